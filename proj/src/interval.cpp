#include "relax/interval.hpp"

#include <algorithm>

namespace relax {

bool operator<(const Bound& a, const Bound& b) {
    if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) < static_cast<int>(b.kind_);
    return a.kind_ == Bound::Kind::Finite && a.value_ < b.value_;
}

Bound Bound::operator-() const {
    switch (kind_) {
    case Kind::PlusInf: return minus_inf();
    case Kind::MinusInf: return plus_inf();
    case Kind::Finite: break;
    }
    if (value_ == std::numeric_limits<std::int64_t>::min()) return plus_inf();
    return finite(-value_);
}

// +inf + -inf never occurs for interval endpoints (lo + lo, hi + hi), but
// resolve it to the argument order anyway so the function is total.
Bound operator+(const Bound& a, const Bound& b) {
    if (!a.is_finite()) return a;
    if (!b.is_finite()) return b;
    std::int64_t r = 0;
    if (__builtin_add_overflow(a.value_, b.value_, &r)) {
        return a.value_ > 0 ? Bound::plus_inf() : Bound::minus_inf();
    }
    return Bound::finite(r);
}

Bound operator*(const Bound& a, const Bound& b) {
    const auto sign = [](const Bound& x) {
        if (x.is_plus_inf()) return 1;
        if (x.is_minus_inf()) return -1;
        return x.value_ > 0 ? 1 : (x.value_ < 0 ? -1 : 0);
    };
    const int sa = sign(a);
    const int sb = sign(b);
    if (sa == 0 || sb == 0) return Bound::finite(0);
    if (a.is_finite() && b.is_finite()) {
        std::int64_t r = 0;
        if (!__builtin_mul_overflow(a.value_, b.value_, &r)) return Bound::finite(r);
    }
    return sa * sb > 0 ? Bound::plus_inf() : Bound::minus_inf();
}

std::string Bound::str() const {
    switch (kind_) {
    case Kind::PlusInf: return "+oo";
    case Kind::MinusInf: return "-oo";
    case Kind::Finite: break;
    }
    return std::to_string(value_);
}

Interval::Interval(Bound lo, Bound hi) : lo_(lo), hi_(hi), bottom_(hi < lo) {
    if (bottom_) {
        lo_ = Bound::plus_inf();
        hi_ = Bound::minus_inf();
    }
}

std::optional<std::int64_t> Interval::singleton() const {
    if (!bottom_ && lo_.is_finite() && lo_ == hi_) return lo_.value();
    return std::nullopt;
}

bool Interval::contains(std::int64_t v) const {
    return !bottom_ && lo_ <= Bound::finite(v) && Bound::finite(v) <= hi_;
}

bool Interval::leq(const Interval& o) const {
    if (bottom_) return true;
    if (o.bottom_) return false;
    return o.lo_ <= lo_ && hi_ <= o.hi_;
}

bool operator==(const Interval& a, const Interval& b) {
    if (a.bottom_ || b.bottom_) return a.bottom_ == b.bottom_;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
}

Interval Interval::join(const Interval& o) const {
    if (bottom_) return o;
    if (o.bottom_) return *this;
    return Interval(std::min(lo_, o.lo_), std::max(hi_, o.hi_));
}

Interval Interval::meet(const Interval& o) const {
    if (bottom_ || o.bottom_) return bottom();
    return Interval(std::max(lo_, o.lo_), std::min(hi_, o.hi_));
}

Interval Interval::widen(const Interval& next) const {
    if (bottom_) return next;
    if (next.bottom_) return *this;
    const Bound lo = next.lo_ < lo_ ? Bound::minus_inf() : lo_;
    const Bound hi = hi_ < next.hi_ ? Bound::plus_inf() : hi_;
    return Interval(lo, hi);
}

// Concrete arithmetic wraps around, so an operation whose finite operands
// can overflow may produce any value: the result is top.
namespace {
bool overflowed(const Bound& x, const Bound& y, const Bound& r) {
    return x.is_finite() && y.is_finite() && !r.is_finite();
}
} // namespace

Interval Interval::operator-() const {
    if (bottom_) return *this;
    if (lo_ == Bound::finite(std::numeric_limits<std::int64_t>::min())) return top();
    return Interval(-hi_, -lo_);
}

Interval operator+(const Interval& a, const Interval& b) {
    if (a.bottom_ || b.bottom_) return Interval::bottom();
    const Bound lo = a.lo_ + b.lo_;
    const Bound hi = a.hi_ + b.hi_;
    if (overflowed(a.lo_, b.lo_, lo) || overflowed(a.hi_, b.hi_, hi)) return Interval::top();
    return Interval(lo, hi);
}

Interval operator-(const Interval& a, const Interval& b) {
    if (a.bottom_ || b.bottom_) return Interval::bottom();
    if (b.lo_ == Bound::finite(std::numeric_limits<std::int64_t>::min())) return Interval::top();
    return a + (-b);
}

Interval operator*(const Interval& a, const Interval& b) {
    if (a.bottom_ || b.bottom_) return Interval::bottom();
    const Bound c[] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
    if (overflowed(a.lo_, b.lo_, c[0]) || overflowed(a.lo_, b.hi_, c[1]) || overflowed(a.hi_, b.lo_, c[2]) ||
        overflowed(a.hi_, b.hi_, c[3])) {
        return Interval::top();
    }
    return Interval(*std::min_element(std::begin(c), std::end(c)), *std::max_element(std::begin(c), std::end(c)));
}

std::string Interval::str() const {
    if (bottom_) return "_|_";
    return "[" + lo_.str() + ", " + hi_.str() + "]";
}

} // namespace relax
