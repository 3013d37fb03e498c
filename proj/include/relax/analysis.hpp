#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relax/domain.hpp"
#include "relax/feasibility.hpp"
#include "relax/ir.hpp"

namespace relax {

// Post-environment of every node, indexed by node id.
using EnvMap = std::vector<Env>;

// Remote stores a load may read, one entry per (store, provenance) pair.
using InterferenceSet = std::map<NodeId, std::vector<RemoteStore>>;

struct StoreKey {
    NodeId store = 0;
    std::vector<NodePair> provenance;
    auto operator<=>(const StoreKey&) const = default;
};

// Environment after each store, split by the reads-from facts the storing
// thread assumed.
using InterferenceTable = std::map<StoreKey, Env>;

// Per-load value contributions that are joined with the sequential value
// instead of replacing it.
using LoadFallback = std::map<NodeId, Interval>;

struct Verdict {
    NodeId node = 0;
    ThreadId thread = 0;
    std::string location;
    int line = 0;
    MemoryModel model = MemoryModel::SC;
    bool proved = true;
    std::optional<InterferenceCombination> witness;
};

struct ThreadStats {
    ThreadId thread = 0;
    std::string name;
    std::size_t loads = 0;
    std::size_t loop_loads = 0;
    std::size_t enumerated = 0;
    std::size_t pruned = 0;
    bool overflow = false;
};

struct Stats {
    std::size_t threads = 0;
    std::size_t nodes = 0;
    std::size_t rounds = 0;
    std::vector<ThreadStats> per_thread; // final round
    std::size_t enumerated = 0;          // final round, all threads
    std::size_t pruned = 0;
    std::size_t enumerated_all_rounds = 0;
    std::size_t pruned_all_rounds = 0;
};

struct AnalysisOptions {
    MemoryModel model = MemoryModel::SC;
    std::size_t max_combinations = 4096;
    std::size_t widen_after_round = 3;
};

struct AnalysisResult {
    EnvMap envs;
    std::vector<Verdict> verdicts; // ordered by node id
    Stats stats;
    std::vector<EnvMap> round_envs; // M after each outer round
};

// Environment at every thread entry: globals at their initial values.
Env initial_env(const Program& p);

// Sequential fixpoint of one thread. Loads in ic read the chosen remote
// environment (or their own value); loads in fallback join the given value
// into their own; other loads keep their own value.
EnvMap analyze_tm(const Program& p, ThreadId t, const InterferenceCombination& ic,
                  const LoadFallback& fallback = {});

// Candidates for each load of thread t from the table, without the store a
// load already reads when it takes no interference.
InterferenceSet interfs(const Program& p, ThreadId t, const InterferenceTable& table, FeasibilityChecker& checker);

struct Enumeration {
    std::vector<InterferenceCombination> combinations;
    bool overflow = false;
};

// Cartesian product over the given loads of NoInterference plus candidates.
Enumeration enumerate_combinations(const std::vector<NodeId>& loads, const InterferenceSet& candidates,
                                   std::size_t cap);

// Join of the candidate values not refuted for the load by the rules alone.
Interval loop_fallback_value(const Program& p, NodeId load, const std::vector<RemoteStore>& candidates,
                             const FeasibilityChecker& checker);

AnalysisResult analyze_all(const Program& p, const AnalysisOptions& options);

} // namespace relax
