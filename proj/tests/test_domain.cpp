#include <doctest.h>

#include <limits>

#include "relax/domain.hpp"
#include "testkit.hpp"

using namespace relax;

namespace {

Interval iv(std::int64_t lo, std::int64_t hi) { return Interval::range(lo, hi); }

const auto inf = Bound::plus_inf();
const auto neg_inf = Bound::minus_inf();

constexpr VarIndex kX = 0, kA = 1, kB = 2;

CondPtr cmp(CmpOp op, VarIndex v, std::int64_t c) { return Cond::compare(op, Expr::variable(v), Expr::constant(c)); }

} // namespace

TEST_CASE("interval join") {
    CHECK(iv(1, 3).join(iv(7, 10)) == iv(1, 10));
    CHECK(Interval::bottom().join(iv(4, 6)) == iv(4, 6));
    CHECK(Interval::constant(0).join(Interval::constant(10)) == iv(0, 10));
}

TEST_CASE("interval ordering") {
    CHECK(iv(4, 6).leq(iv(1, 10)));
    CHECK_FALSE(iv(1, 10).leq(iv(4, 6)));
    CHECK(Interval::bottom().leq(Interval::bottom()));
    CHECK(Interval::bottom().leq(iv(3, 3)));
    CHECK(iv(3, 3).leq(Interval::top()));
}

TEST_CASE("interval widening") {
    CHECK(iv(0, 1).widen(iv(0, 2)) == Interval(Bound::finite(0), inf));
    CHECK(iv(0, 5).widen(iv(0, 5)) == iv(0, 5));
    CHECK(iv(0, 1).widen(iv(-1, 1)) == Interval(neg_inf, Bound::finite(1)));
    CHECK(Interval::bottom().widen(iv(2, 3)) == iv(2, 3));
}

TEST_CASE("interval meet and printing") {
    CHECK(iv(0, 5).meet(iv(3, 9)) == iv(3, 5));
    CHECK(iv(0, 2).meet(iv(3, 9)).is_bottom());
    CHECK(iv(1, 10).str() == "[1, 10]");
    CHECK(Interval(Bound::finite(3), inf).str() == "[3, +oo]");
    CHECK(Interval::top().str() == "[-oo, +oo]");
    CHECK(Interval::bottom().str() == "_|_");
}

TEST_CASE("interval arithmetic") {
    CHECK(iv(1, 3) + iv(2, 5) == iv(3, 8));
    CHECK(iv(1, 3) - iv(2, 5) == iv(-4, 1));
    CHECK(-iv(1, 3) == iv(-3, -1));
    CHECK(iv(-2, 3) * iv(4, 5) == iv(-10, 15));
    CHECK(iv(-2, -1) * iv(-3, 4) == iv(-8, 6));
    // Four-corner rule with 0 * infinity = 0.
    CHECK(Interval::constant(0) * Interval::top() == Interval::constant(0));
    CHECK(Interval(Bound::finite(1), inf) * Interval::constant(-2) == Interval(neg_inf, Bound::finite(-2)));
    CHECK((Interval::bottom() + iv(1, 2)).is_bottom());
}

TEST_CASE("finite overflow gives top, matching wrap-around execution") {
    const auto max = std::numeric_limits<std::int64_t>::max();
    const auto min = std::numeric_limits<std::int64_t>::min();
    CHECK((Interval::constant(max) + Interval::constant(1)).is_top());
    CHECK((Interval::constant(min) - Interval::constant(1)).is_top());
    CHECK((-Interval::constant(min)).is_top());
    CHECK((Interval::constant(max) * Interval::constant(2)).is_top());
    CHECK(Interval::constant(max) + Interval::constant(0) == Interval::constant(max));
}

TEST_CASE("transfer of a store over an environment") {
    Env env = Env::top();
    env.set(kX, iv(1, 3));
    env.set(kA, iv(2, 5));
    const Env out =
        transfer(Store{kX, Expr::binary(Expr::Op::Add, Expr::variable(kA), Expr::constant(1))}, env);
    CHECK(out.get(kX) == iv(3, 6));
    CHECK(out.get(kA) == iv(2, 5));
    CHECK(out.bindings().size() == 2);
}

TEST_CASE("assume refines or kills the environment") {
    Env env = Env::top();
    env.set(kA, iv(0, 10));
    CHECK(transfer(Assume{cmp(CmpOp::Eq, kA, 10)}, env).get(kA) == Interval::constant(10));
    env.set(kA, iv(0, 5));
    CHECK(transfer(Assume{cmp(CmpOp::Eq, kA, 10)}, env).is_bottom());
    CHECK(transfer(Assume{cmp(CmpOp::Lt, kA, 3)}, env).get(kA) == iv(0, 2));
    CHECK(transfer(Assume{Cond::negation(cmp(CmpOp::Lt, kA, 3))}, env).get(kA) == iv(3, 5));
    CHECK(transfer(Assume{cmp(CmpOp::Ne, kA, 0)}, env).get(kA) == iv(1, 5));
    // A disjunction joins the refinements of its sides.
    const auto either = Cond::disj(cmp(CmpOp::Eq, kA, 1), cmp(CmpOp::Eq, kA, 4));
    CHECK(transfer(Assume{either}, env).get(kA) == iv(1, 4));
    // Relations between two variables narrow both.
    env.set(kB, iv(3, 8));
    const Env rel = transfer(Assume{Cond::compare(CmpOp::Gt, Expr::variable(kA), Expr::variable(kB))}, env);
    CHECK(rel.get(kA) == iv(4, 5));
    CHECK(rel.get(kB) == iv(3, 4));
}

TEST_CASE("synchronization and asserts leave the environment unchanged") {
    Env env = Env::top();
    env.set(kA, iv(0, 10));
    CHECK(transfer(Fence{}, env) == env);
    CHECK(transfer(Membar{membar::SL}, env) == env);
    CHECK(transfer(Nop{}, env) == env);
    CHECK(transfer(ThreadCreate{1}, env) == env);
    CHECK(transfer(ThreadJoin{1}, env) == env);
    CHECK(transfer(Assert{cmp(CmpOp::Eq, kA, 3), "", 0}, env) == env);
    CHECK(transfer(Load{kB, kA}, env).get(kB) == iv(0, 10));
}

TEST_CASE("environment lattice") {
    Env zero = Env::top(), five = Env::top();
    zero.set(kX, Interval::constant(0));
    five.set(kX, Interval::constant(5));
    CHECK(zero.join(five).get(kX) == iv(0, 5));
    CHECK(Env::bottom().leq(five));
    CHECK(Env::bottom().join(five) == five);
    CHECK(five.widen(five) == five);
    CHECK(zero.widen(zero.join(five)).get(kX) == Interval(Bound::finite(0), inf));
    CHECK(five.leq(Env::top()));
    CHECK_FALSE(Env::top().leq(five));
    Env dead = five;
    dead.set(kA, Interval::bottom());
    CHECK(dead.is_bottom());
}

TEST_CASE("may_be_false decides assertions") {
    Env env = Env::top();
    env.set(kB, Interval::constant(5));
    CHECK_FALSE(may_be_false(*cmp(CmpOp::Eq, kB, 5), env));
    env.set(kB, iv(0, 5));
    CHECK(may_be_false(*cmp(CmpOp::Eq, kB, 5), env));
    CHECK_FALSE(may_be_false(*cmp(CmpOp::Eq, kB, 5), Env::bottom()));
    CHECK(may_be_true(*cmp(CmpOp::Eq, kB, 5), env));
    CHECK_FALSE(may_be_true(*cmp(CmpOp::Gt, kB, 5), env));
    const auto both = Cond::negation(Cond::conj(cmp(CmpOp::Eq, kA, 0), cmp(CmpOp::Eq, kB, 0)));
    env.set(kA, iv(1, 1));
    CHECK_FALSE(may_be_false(*both, env));
}

TEST_CASE("evaluation of expressions") {
    Env env = Env::top();
    env.set(kA, iv(2, 5));
    CHECK(eval(*Expr::binary(Expr::Op::Mul, Expr::variable(kA), Expr::constant(2)), env) == iv(4, 10));
    CHECK(eval(*Expr::variable(kB), env).is_top());
    CHECK(eval(*Expr::constant(7), Env::bottom()).is_bottom());
}
