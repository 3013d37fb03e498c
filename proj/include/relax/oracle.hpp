#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "relax/feasibility.hpp"
#include "relax/ir.hpp"

namespace relax::oracle {

struct Limits {
    std::size_t max_events = 12;    // performed loads and stores, initial values excluded
    std::size_t max_loop_iters = 3; // entries into one loop head per thread
};

struct Event {
    enum class Kind { Load, Store };
    NodeId node = 0;
    Kind kind = Kind::Load;
    ThreadId thread = 0;
    VarIndex var = 0;
    std::int64_t value = 0;
};

// One distinct outcome: final values of all variables, the asserts it
// violated and the store each load last read. `trace` is one event order
// producing it.
struct Execution {
    std::vector<Event> trace;
    std::vector<std::int64_t> values; // indexed by VarIndex
    std::set<NodeId> violated;
    std::map<NodeId, NodeId> reads_from;
};

struct Result {
    std::vector<Execution> executions; // sorted by outcome
    bool truncated = false;            // some path was cut at the loop bound
    std::size_t states = 0;
};

class LimitExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// All executions of the program under the model. Each thread issues its
// instructions in program order into a window of in-flight memory
// operations, which then take effect in any order the model permits.
// Issuing waits for pending loads whose result it needs, and fences, thread
// creation, joining and thread exit wait for an empty window.
Result enumerate(const Program& p, MemoryModel model, const Limits& limits = {});

// Assert node -> some execution violates it.
std::map<NodeId, bool> violates(const Program& p, MemoryModel model, const Limits& limits = {});

std::string format_trace(const Program& p, const Execution& e);

} // namespace relax::oracle
