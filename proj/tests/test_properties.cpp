#include <doctest.h>

#include "suites.hpp"

using namespace relax::testkit;

namespace {

void require_suite(const SuiteResult& r) {
    INFO(r.name);
    std::string all;
    for (const auto& f : r.failures) all += f + "\n";
    CHECK_MESSAGE(r.ok(), all);
    CHECK(r.cases >= kDefaultCases);
}

} // namespace

TEST_CASE("interval and environment lattice laws") { require_suite(lattice_laws(11)); }
TEST_CASE("widening dominates join and stabilizes") { require_suite(widening_ascent(12)); }
TEST_CASE("transfer is monotone") { require_suite(transfer_monotonicity(13)); }
TEST_CASE("transfer covers concrete single steps") { require_suite(transfer_concrete_soundness(14)); }
TEST_CASE("weaker models derive fewer orderings") { require_suite(model_inclusion_chains(15)); }
TEST_CASE("more reads-from facts never remove derived tuples") { require_suite(fact_monotonicity(16)); }
TEST_CASE("Datalog engine computes closures incrementally") { require_suite(datalog_closure(17)); }
TEST_CASE("dominators match brute-force path search") { require_suite(dominator_equivalence(18)); }
TEST_CASE("oracle behaviors grow with weaker models") { require_suite(oracle_inclusion_chain(19)); }
TEST_CASE("SC oracle agrees with a naive interleaver") { require_suite(naive_interleaving_agreement(20)); }
TEST_CASE("a proof under a weak model holds under stronger ones") { require_suite(verdict_monotonicity(21)); }
TEST_CASE("reports are byte-identical across runs") { require_suite(determinism(22)); }
TEST_CASE("reads-from maps of real executions are feasible") { require_suite(realized_reads_are_feasible(23)); }
TEST_CASE("random programs: oracle violation means ALARM") { require_suite(random_soundness(24)); }
TEST_CASE("outer rounds are increasing") { require_suite(outer_rounds_grow(25)); }
TEST_CASE("one thread: same envs as sequential analysis") { require_suite(single_thread_degeneracy(26)); }
