#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

namespace relax {

// A bound is a 64-bit integer or +/- infinity. Bound arithmetic saturates;
// interval arithmetic turns any finite overflow into top, matching the
// wrap-around concrete semantics.
class Bound {
  public:
    static Bound finite(std::int64_t v) { return Bound(Kind::Finite, v); }
    static Bound plus_inf() { return Bound(Kind::PlusInf, 0); }
    static Bound minus_inf() { return Bound(Kind::MinusInf, 0); }

    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_plus_inf() const { return kind_ == Kind::PlusInf; }
    bool is_minus_inf() const { return kind_ == Kind::MinusInf; }
    std::int64_t value() const { return value_; }

    friend bool operator==(const Bound& a, const Bound& b) {
        return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
    }
    friend bool operator<(const Bound& a, const Bound& b);
    friend bool operator<=(const Bound& a, const Bound& b) { return a < b || a == b; }

    Bound operator-() const;
    friend Bound operator+(const Bound& a, const Bound& b);
    friend Bound operator*(const Bound& a, const Bound& b);

    std::string str() const;

  private:
    enum class Kind { MinusInf, Finite, PlusInf };
    Bound(Kind k, std::int64_t v) : kind_(k), value_(v) {}
    Kind kind_;
    std::int64_t value_;
};

class Interval {
  public:
    Interval() : Interval(top()) {}
    Interval(Bound lo, Bound hi);

    static Interval top() { return Interval(Bound::minus_inf(), Bound::plus_inf(), false); }
    static Interval bottom() { return Interval(Bound::plus_inf(), Bound::minus_inf(), true); }
    static Interval constant(std::int64_t v) { return Interval(Bound::finite(v), Bound::finite(v)); }
    static Interval range(std::int64_t lo, std::int64_t hi) { return Interval(Bound::finite(lo), Bound::finite(hi)); }

    bool is_bottom() const { return bottom_; }
    bool is_top() const { return !bottom_ && lo_.is_minus_inf() && hi_.is_plus_inf(); }
    const Bound& lo() const { return lo_; }
    const Bound& hi() const { return hi_; }
    std::optional<std::int64_t> singleton() const;
    bool contains(std::int64_t v) const;

    bool leq(const Interval& o) const;
    friend bool operator==(const Interval& a, const Interval& b);

    Interval join(const Interval& o) const;
    Interval meet(const Interval& o) const;
    Interval widen(const Interval& next) const;

    Interval operator-() const;
    friend Interval operator+(const Interval& a, const Interval& b);
    friend Interval operator-(const Interval& a, const Interval& b);
    friend Interval operator*(const Interval& a, const Interval& b);

    std::string str() const;

  private:
    Interval(Bound lo, Bound hi, bool bottom) : lo_(lo), hi_(hi), bottom_(bottom) {}
    Bound lo_;
    Bound hi_;
    bool bottom_;
};

} // namespace relax
