#include "relax/domain.hpp"

#include <sstream>

namespace relax {

Interval Env::get(VarIndex v) const {
    if (bottom_) return Interval::bottom();
    auto it = vals_.find(v);
    return it == vals_.end() ? Interval::top() : it->second;
}

void Env::set(VarIndex v, const Interval& value) {
    if (bottom_) return;
    if (value.is_bottom()) {
        *this = bottom();
    } else if (value.is_top()) {
        vals_.erase(v);
    } else {
        vals_[v] = value;
    }
}

void Env::forget(VarIndex v) {
    if (!bottom_) vals_.erase(v);
}

bool Env::leq(const Env& o) const {
    if (bottom_) return true;
    if (o.bottom_) return false;
    for (const auto& [v, itv] : o.vals_) {
        if (!get(v).leq(itv)) return false;
    }
    return true;
}

bool operator==(const Env& a, const Env& b) {
    if (a.bottom_ || b.bottom_) return a.bottom_ == b.bottom_;
    return a.vals_ == b.vals_;
}

Env Env::join(const Env& o) const {
    if (bottom_) return o;
    if (o.bottom_) return *this;
    Env r = top();
    for (const auto& [v, itv] : vals_) {
        auto it = o.vals_.find(v);
        if (it != o.vals_.end()) r.set(v, itv.join(it->second));
    }
    return r;
}

Env Env::meet(const Env& o) const {
    if (bottom_ || o.bottom_) return bottom();
    Env r = *this;
    for (const auto& [v, itv] : o.vals_) r.set(v, r.get(v).meet(itv));
    return r;
}

Env Env::widen(const Env& next) const {
    if (bottom_) return next;
    if (next.bottom_) return *this;
    Env r = top();
    for (const auto& [v, itv] : vals_) {
        auto it = next.vals_.find(v);
        if (it != next.vals_.end()) r.set(v, itv.widen(it->second));
    }
    return r;
}

std::string Env::str(const Program& p) const {
    if (bottom_) return "_|_";
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (const auto& [v, itv] : vals_) {
        out << (first ? "" : ", ") << p.var(v).name << " -> " << itv.str();
        first = false;
    }
    out << "}";
    return out.str();
}

Interval eval(const Expr& e, const Env& env) {
    if (env.is_bottom()) return Interval::bottom();
    switch (e.op) {
    case Expr::Op::Const: return Interval::constant(e.value);
    case Expr::Op::Var: return env.get(e.var);
    case Expr::Op::Neg: return -eval(*e.lhs, env);
    case Expr::Op::Add: return eval(*e.lhs, env) + eval(*e.rhs, env);
    case Expr::Op::Sub: return eval(*e.lhs, env) - eval(*e.rhs, env);
    case Expr::Op::Mul: return eval(*e.lhs, env) * eval(*e.rhs, env);
    }
    return Interval::top();
}

namespace {

// Values x such that x op y holds for some y in other.
Interval satisfying(CmpOp op, const Interval& other) {
    if (other.is_bottom()) return Interval::bottom();
    const auto one = Bound::finite(1);
    switch (op) {
    case CmpOp::Eq: return other;
    case CmpOp::Ne: return Interval::top();
    case CmpOp::Lt: return Interval(Bound::minus_inf(), other.hi() + -one);
    case CmpOp::Le: return Interval(Bound::minus_inf(), other.hi());
    case CmpOp::Gt: return Interval(other.lo() + one, Bound::plus_inf());
    case CmpOp::Ge: return Interval(other.lo(), Bound::plus_inf());
    }
    return Interval::top();
}

// x != c only excludes c when it sits on an endpoint of x.
Interval exclude(const Interval& x, std::int64_t c) {
    if (x.is_bottom()) return x;
    if (x.singleton() == c) return Interval::bottom();
    if (x.lo() == Bound::finite(c)) return Interval(x.lo() + Bound::finite(1), x.hi());
    if (x.hi() == Bound::finite(c)) return Interval(x.lo(), x.hi() + Bound::finite(-1));
    return x;
}

bool can_hold(CmpOp op, const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) return false;
    switch (op) {
    case CmpOp::Eq: return !a.meet(b).is_bottom();
    case CmpOp::Ne: return !(a.singleton() && a.singleton() == b.singleton());
    case CmpOp::Lt: return a.lo() < b.hi();
    case CmpOp::Le: return a.lo() <= b.hi();
    case CmpOp::Gt: return b.lo() < a.hi();
    case CmpOp::Ge: return b.lo() <= a.hi();
    }
    return true;
}

Env refine_var(Env env, VarIndex v, CmpOp op, const Interval& other) {
    Interval cur = env.get(v);
    if (op == CmpOp::Ne) {
        if (auto c = other.singleton()) cur = exclude(cur, *c);
    } else {
        cur = cur.meet(satisfying(op, other));
    }
    env.set(v, cur);
    return env;
}

Env refine_cmp(const Env& env, CmpOp op, const Expr& a, const Expr& b) {
    const Interval ia = eval(a, env);
    const Interval ib = eval(b, env);
    if (!can_hold(op, ia, ib)) return Env::bottom();
    Env out = env;
    if (a.op == Expr::Op::Var) out = refine_var(out, a.var, op, ib);
    if (b.op == Expr::Op::Var) out = refine_var(out, b.var, swap_sides(op), eval(a, out));
    return out;
}

Env refine_impl(const Env& env, const Cond& c, bool positive) {
    if (env.is_bottom()) return env;
    switch (c.op) {
    case Cond::Op::Cmp: return refine_cmp(env, positive ? c.cmp : negate(c.cmp), *c.a, *c.b);
    case Cond::Op::Not: return refine_impl(env, *c.lhs, !positive);
    case Cond::Op::And:
    case Cond::Op::Or: {
        const bool conjunctive = (c.op == Cond::Op::And) == positive;
        if (conjunctive) return refine_impl(refine_impl(env, *c.lhs, positive), *c.rhs, positive);
        return refine_impl(env, *c.lhs, positive).join(refine_impl(env, *c.rhs, positive));
    }
    }
    return env;
}

} // namespace

Env refine(const Env& env, const Cond& c) { return refine_impl(env, c, true); }

bool may_be_true(const Cond& c, const Env& env) { return !refine_impl(env, c, true).is_bottom(); }

bool may_be_false(const Cond& c, const Env& env) { return !refine_impl(env, c, false).is_bottom(); }

Env transfer(const Instruction& instr, const Env& in) {
    if (in.is_bottom()) return in;
    return std::visit(overloaded{
                          [&](const Load& l) {
                              Env out = in;
                              out.set(l.dst, in.get(l.src));
                              return out;
                          },
                          [&](const Store& s) {
                              Env out = in;
                              out.set(s.dst, eval(*s.value, in));
                              return out;
                          },
                          [&](const LocalAssign& a) {
                              Env out = in;
                              out.set(a.dst, eval(*a.value, in));
                              return out;
                          },
                          [&](const Assume& a) { return refine(in, *a.cond); },
                          [&](const auto&) { return in; },
                      },
                      instr);
}

} // namespace relax
