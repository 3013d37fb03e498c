#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "relax/datalog.hpp"
#include "relax/domain.hpp"
#include "relax/ir.hpp"
#include "relax/relations.hpp"

namespace relax {

enum class MemoryModel { SC, TSO, PSO, RMO };

inline constexpr MemoryModel kAllModels[] = {MemoryModel::SC, MemoryModel::TSO, MemoryModel::PSO, MemoryModel::RMO};

std::optional<MemoryModel> parse_model(std::string_view text); // case-insensitive
const char* to_string(MemoryModel m);

// A load keeps its sequential (own-thread) value.
struct NoInterference {};

// A load reads a store of another thread (or an initial value). `provenance`
// holds the reads-from facts under which the storing thread computed `env`.
struct RemoteStore {
    NodeId store = 0;
    Env env = Env::bottom();
    std::vector<NodePair> provenance;
};

using InterferenceChoice = std::variant<NoInterference, RemoteStore>;
using InterferenceCombination = std::map<NodeId, InterferenceChoice>;

struct FeasibilityResult {
    bool feasible = true;
    std::optional<NodePair> witness; // (load, store) found in MustNotReadFrom
};

class ContractViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

// Same-thread pairs (s1, s2) of events that the model keeps in program order.
PairSet compute_no_reorder(const Program& p, MemoryModel model);

// Holds the static relations of one program under one model, with the
// must-happen-before closure for empty reads-from precomputed, and answers
// feasibility queries incrementally on top of it. Not thread-safe.
class FeasibilityChecker {
  public:
    FeasibilityChecker(const Program& p, MemoryModel model);

    const Program& program() const { return program_; }
    MemoryModel model() const { return model_; }
    const PairSet& no_reorder() const { return no_reorder_; }

    PairSet mhb(const std::vector<NodePair>& reads_from);
    PairSet must_not_read_from(const std::vector<NodePair>& reads_from);

    // Feasibility of a set of reads-from facts. Two different sources for one
    // load are contradictory (every load with facts executes at most once).
    FeasibilityResult check(const std::vector<NodePair>& reads_from);
    FeasibilityResult check(const InterferenceCombination& ic);

    // The reads-from facts an interference combination stands for, without
    // provenance. Throws ContractViolation on a malformed combination.
    std::vector<NodePair> facts_of(const InterferenceCombination& ic) const;

    // Own store a load reads when it sees no interference: the unique
    // reaching same-thread store, the initial-value store when only the
    // thread entry reaches, nothing when several stores may reach.
    std::optional<NodeId> sequential_source(NodeId load) const;

    bool on_cycle(NodeId n) const { return cyclic_.contains(n); }
    bool dominates(NodeId a, NodeId b) const;
    // Refuted by the deduction rules with no reads-from assumptions.
    bool refuted_without_facts(NodeId load, NodeId store) const;

    // Static relations plus NoReorder, MHB and MustNotReadFrom for empty
    // reads-from, in the dump format.
    std::string dump();

  private:
    void query(const std::vector<NodePair>& reads_from);

    const Program& program_;
    MemoryModel model_;
    datalog::Database db_;
    std::vector<datalog::Rule> rules_;
    datalog::Database::Mark base_;
    PairSet no_reorder_;
    PairSet dominates_;
    std::set<NodeId> cyclic_;
    PairSet base_mnrf_;
    mutable std::map<NodeId, std::optional<NodeId>> sequential_source_;
};

// One-shot helpers over a fresh checker.
PairSet deduce_mhb(const Program& p, MemoryModel model, const std::vector<NodePair>& reads_from);
PairSet deduce_must_not_read_from(const Program& p, MemoryModel model, const std::vector<NodePair>& reads_from);
FeasibilityResult check_feasible(const Program& p, MemoryModel model, const InterferenceCombination& ic);

// Nodes lying on a cycle of their thread's flow graph.
std::set<NodeId> cyclic_nodes(const Program& p);

} // namespace relax
