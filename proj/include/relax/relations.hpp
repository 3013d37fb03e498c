#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "relax/datalog.hpp"
#include "relax/ir.hpp"

namespace relax {

using NodePair = std::pair<NodeId, NodeId>;
using PairSet = std::set<NodePair>;

// Strict domination within one thread's flow graph.
PairSet compute_dominates(const Program& p, const FlowGraph& g);
// (a, b) iff there is no path of length >= 1 from b to a.
PairSet compute_not_reachable_from(const Program& p, const FlowGraph& g);
// (a, b) iff a != b and b is reachable from a.
PairSet compute_program_order(const Program& p, const FlowGraph& g);

struct ThreadEdges {
    PairSet creates; // (create node, child entry)
    PairSet joins;   // (join node, child exit)
};
ThreadEdges compute_thread_edges(const Program& p);

// Fences, thread creation and joining, and thread entry/exit points. They
// order every same-thread event they can precede or follow.
bool is_sync_node(const Program& p, NodeId n);

// Relation names used in the fact database.
namespace rel {
inline constexpr const char* IsLoad = "IsLoad";
inline constexpr const char* IsStore = "IsStore";
inline constexpr const char* IsFence = "IsFence";
inline constexpr const char* IsLLMembar = "IsLLMembar";
inline constexpr const char* IsLSMembar = "IsLSMembar";
inline constexpr const char* IsSLMembar = "IsSLMembar";
inline constexpr const char* IsSSMembar = "IsSSMembar";
inline constexpr const char* Dominates = "Dominates";
inline constexpr const char* NotReachableFrom = "NotReachableFrom";
inline constexpr const char* ThreadCreates = "ThreadCreates";
inline constexpr const char* ThreadJoins = "ThreadJoins";
inline constexpr const char* ProgramOrder = "ProgramOrder";
inline constexpr const char* IsAccess = "IsAccess";
inline constexpr const char* IsSync = "IsSync";
inline constexpr const char* IsEvent = "IsEvent";
inline constexpr const char* NoReorder = "NoReorder";
inline constexpr const char* MHB = "MHB";
inline constexpr const char* ReadsFrom = "ReadsFrom";
inline constexpr const char* MustNotReadFrom = "MustNotReadFrom";
} // namespace rel

// Database with the static input relations of a program filled in and the
// derived relations declared (empty).
datalog::Database extract_relations(const Program& p);

// One tuple per line, "REL(a,b)", relations in declaration order and tuples
// sorted. Nodes print as their id, variables by name.
std::string dump_relations(const datalog::Database& db, const Program& p);

} // namespace relax
