#pragma once

#include <map>
#include <string>

#include "relax/interval.hpp"
#include "relax/ir.hpp"

namespace relax {

// Non-relational interval environment. Variables without an entry are top;
// bottom means the program point is unreachable.
class Env {
  public:
    static Env top() { return Env(false); }
    static Env bottom() { return Env(true); }

    bool is_bottom() const { return bottom_; }
    Interval get(VarIndex v) const;
    // Setting a variable to bottom makes the whole environment bottom.
    void set(VarIndex v, const Interval& value);
    void forget(VarIndex v);

    bool leq(const Env& o) const;
    friend bool operator==(const Env& a, const Env& b);

    Env join(const Env& o) const;
    Env meet(const Env& o) const;
    Env widen(const Env& next) const;

    const std::map<VarIndex, Interval>& bindings() const { return vals_; }
    std::string str(const Program& p) const;

  private:
    explicit Env(bool bottom) : bottom_(bottom) {}
    bool bottom_;
    std::map<VarIndex, Interval> vals_;
};

Interval eval(const Expr& e, const Env& env);

// Over-approximation of the states in env satisfying c.
Env refine(const Env& env, const Cond& c);

bool may_be_true(const Cond& c, const Env& env);
bool may_be_false(const Cond& c, const Env& env);

// Effect of a single non-synchronizing instruction. A load copies the value
// the environment holds for the global; the analysis substitutes a different
// environment when it considers remote stores. Assertions do not refine.
Env transfer(const Instruction& instr, const Env& in);

} // namespace relax
