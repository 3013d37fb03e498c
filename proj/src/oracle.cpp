#include "relax/oracle.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace relax::oracle {

namespace {

struct Entry {
    enum class Kind : std::uint8_t { Load, Store, Membar };
    Kind kind = Kind::Load;
    NodeId node = 0;
    VarIndex var = 0;         // accessed global
    VarIndex dst = 0;         // load destination
    std::int64_t value = 0;   // store value
    std::uint8_t kinds = 0;   // membar kinds
};

struct ThreadState {
    bool started = false;
    bool finished = false;
    NodeId pc = 0;
    std::vector<Entry> window;
    std::map<NodeId, std::uint8_t> head_visits;
};

struct State {
    std::vector<ThreadState> threads;
    std::vector<std::int64_t> values;
    std::vector<bool> pending;
    std::vector<NodeId> last_writer; // per global
    std::set<NodeId> violated;
    std::map<NodeId, NodeId> reads_from;
    std::vector<Event> trace;
    std::size_t events = 0;
};

std::string encode(const State& s) {
    std::ostringstream out;
    for (const auto& t : s.threads) {
        out << t.started << t.finished << ',' << t.pc << '[';
        for (const auto& e : t.window) {
            out << static_cast<int>(e.kind) << ':' << e.node << ':' << e.value << ';';
        }
        out << ']';
        for (const auto& [h, c] : t.head_visits) out << h << '=' << static_cast<int>(c) << ';';
        out << '|';
    }
    for (auto v : s.values) out << v << ',';
    out << '|';
    for (bool b : s.pending) out << b;
    out << '|';
    for (auto w : s.last_writer) out << w << ',';
    out << '|';
    for (auto n : s.violated) out << n << ',';
    out << '|';
    for (const auto& [l, st] : s.reads_from) out << l << '>' << st << ',';
    return out.str();
}

class Explorer {
  public:
    Explorer(const Program& p, MemoryModel model, const Limits& limits)
        : p_(p), model_(model), limits_(limits), globals_(p.globals()) {
        for (const auto& g : p.threads()) heads_.merge(loop_heads(g));
    }

    Result run() {
        State s;
        s.threads.resize(p_.threads().size());
        s.values.assign(p_.vars().size(), 0);
        s.pending.assign(p_.vars().size(), false);
        s.last_writer.assign(p_.vars().size(), 0);
        for (VarIndex v : globals_) {
            s.values[v] = p_.var(v).initial;
            s.last_writer[v] = *p_.init_store(v);
        }
        s.threads[kRootThread].started = true;
        s.threads[kRootThread].pc = p_.root().entry;
        explore(s);

        Result r;
        r.truncated = truncated_;
        r.states = visited_.size();
        for (auto& [key, e] : outcomes_) r.executions.push_back(std::move(e));
        return r;
    }

  private:
    std::set<NodeId> loop_heads(const FlowGraph& g) const {
        std::set<NodeId> heads;
        std::set<NodeId> visited{g.entry};
        std::set<NodeId> on_stack{g.entry};
        std::vector<std::pair<NodeId, std::size_t>> stack{{g.entry, 0}};
        while (!stack.empty()) {
            auto& [n, i] = stack.back();
            const auto& succs = p_.succs(n);
            if (i < succs.size()) {
                const NodeId s = succs[i++];
                if (on_stack.contains(s)) {
                    heads.insert(s);
                } else if (visited.insert(s).second) {
                    on_stack.insert(s);
                    stack.emplace_back(s, 0);
                }
            } else {
                on_stack.erase(n);
                stack.pop_back();
            }
        }
        return heads;
    }

    bool is_load(const Entry& e) const { return e.kind == Entry::Kind::Load; }

    // Must `later` wait for `earlier` (both accesses, same thread)?
    bool ordered(const Entry& earlier, const Entry& later) const {
        const bool l1 = is_load(earlier);
        const bool l2 = is_load(later);
        const bool same = earlier.var == later.var;
        switch (model_) {
        case MemoryModel::SC: return true;
        case MemoryModel::TSO: return l1 || !l2;
        case MemoryModel::PSO: return l1 || (!l2 && same);
        case MemoryModel::RMO: return same && !(!l1 && l2);
        }
        return true;
    }

    bool can_perform(const std::vector<Entry>& window, std::size_t i) const {
        const Entry& e = window[i];
        if (e.kind == Entry::Kind::Membar) return false;
        for (std::size_t j = 0; j < i; ++j) {
            const Entry& prior = window[j];
            if (prior.kind == Entry::Kind::Membar) continue;
            if (ordered(prior, e)) return false;
            for (std::size_t m = j + 1; m < i; ++m) {
                if (window[m].kind != Entry::Kind::Membar) continue;
                const std::uint8_t need = is_load(prior) ? (is_load(e) ? membar::LL : membar::LS)
                                                         : (is_load(e) ? membar::SL : membar::SS);
                if (window[m].kinds & need) return false;
            }
        }
        return true;
    }

    static void drop_leading_membars(std::vector<Entry>& window) {
        while (!window.empty() && window.front().kind == Entry::Kind::Membar) window.erase(window.begin());
    }

    void perform(State s, ThreadId t, std::size_t i) {
        auto& window = s.threads[t].window;
        const Entry e = window[i];
        window.erase(window.begin() + static_cast<std::ptrdiff_t>(i));
        if (++s.events > limits_.max_events) {
            throw LimitExceeded("execution exceeds " + std::to_string(limits_.max_events) + " memory events");
        }
        if (e.kind == Entry::Kind::Store) {
            s.values[e.var] = e.value;
            s.last_writer[e.var] = e.node;
            s.trace.push_back(Event{e.node, Event::Kind::Store, t, e.var, e.value});
        } else {
            std::int64_t value = s.values[e.var];
            NodeId source = s.last_writer[e.var];
            for (std::size_t j = i; j-- > 0;) {
                if (window[j].kind == Entry::Kind::Store && window[j].var == e.var) {
                    value = window[j].value;
                    source = window[j].node;
                    break;
                }
            }
            s.values[e.dst] = value;
            s.pending[e.dst] = false;
            s.reads_from[e.node] = source;
            s.trace.push_back(Event{e.node, Event::Kind::Load, t, e.var, value});
        }
        // A membar with nothing left before it constrains nothing.
        drop_leading_membars(window);
        explore(std::move(s));
    }

    bool needs_pending(const State& s, NodeId n) const {
        std::set<VarIndex> used;
        std::visit(overloaded{
                       [&](const Load& l) { used.insert(l.dst); },
                       [&](const Store& st) { collect_vars(*st.value, used); },
                       [&](const LocalAssign& a) {
                           collect_vars(*a.value, used);
                           used.insert(a.dst);
                       },
                       [&](const Assume& a) { collect_vars(*a.cond, used); },
                       [&](const Assert& a) { collect_vars(*a.cond, used); },
                       [](const auto&) {},
                   },
                   p_.instr(n));
        return std::any_of(used.begin(), used.end(), [&](VarIndex v) { return s.pending[v]; });
    }

    ValueLookup lookup(const State& s) const {
        return [&s](VarIndex v) -> std::optional<std::int64_t> { return s.values[v]; };
    }

    // Executes the instruction at t's pc; returns false if the path dies.
    bool issue(State& s, ThreadId t) {
        ThreadState& ts = s.threads[t];
        const NodeId n = ts.pc;
        const Node& node = p_.node(n);
        return std::visit(
            overloaded{
                [&](const Load& l) {
                    s.pending[l.dst] = true;
                    ts.window.push_back(Entry{Entry::Kind::Load, n, l.src, l.dst, 0, 0});
                    return true;
                },
                [&](const Store& st) {
                    if (node.virtual_init) return true;
                    const auto v = evaluate(*st.value, lookup(s));
                    ts.window.push_back(Entry{Entry::Kind::Store, n, st.dst, 0, *v, 0});
                    return true;
                },
                [&](const LocalAssign& a) {
                    s.values[a.dst] = *evaluate(*a.value, lookup(s));
                    return true;
                },
                [&](const Membar& m) {
                    if (!ts.window.empty()) ts.window.push_back(Entry{Entry::Kind::Membar, n, 0, 0, 0, m.kinds});
                    return true;
                },
                [&](const Assume& a) { return *evaluate(*a.cond, lookup(s)); },
                [&](const Assert& a) {
                    if (!*evaluate(*a.cond, lookup(s))) s.violated.insert(n);
                    return true;
                },
                [&](const ThreadCreate& c) {
                    auto& child = s.threads[c.child];
                    child.started = true;
                    child.pc = p_.graph(c.child).entry;
                    return true;
                },
                [&](const auto&) { return true; },
            },
            node.instr);
    }

    bool can_issue(const State& s, ThreadId t) const {
        const ThreadState& ts = s.threads[t];
        if (!ts.started || ts.finished) return false;
        const NodeId n = ts.pc;
        if (needs_pending(s, n)) return false;
        const auto& instr = p_.instr(n);
        const bool drains = std::holds_alternative<Fence>(instr) || std::holds_alternative<ThreadCreate>(instr) ||
                            std::holds_alternative<ThreadJoin>(instr) || n == p_.graph(t).exit;
        if (drains && !ts.window.empty()) return false;
        if (const auto* j = std::get_if<ThreadJoin>(&instr)) return s.threads[j->child].finished;
        return true;
    }

    void step(State s, ThreadId t) {
        if (!issue(s, t)) return;
        ThreadState& ts = s.threads[t];
        if (ts.pc == p_.graph(t).exit) {
            ts.finished = true;
            explore(std::move(s));
            return;
        }
        const auto& succs = p_.succs(ts.pc);
        for (std::size_t k = 0; k < succs.size(); ++k) {
            State next = k + 1 == succs.size() ? std::move(s) : s;
            ThreadState& nt = next.threads[t];
            nt.pc = succs[k];
            if (heads_.contains(nt.pc) && ++nt.head_visits[nt.pc] > limits_.max_loop_iters + 1) {
                truncated_ = true;
                continue;
            }
            explore(std::move(next));
        }
    }

    void explore(State s) {
        if (!visited_.insert(encode(s)).second) return;
        bool progressed = false;
        for (ThreadId t = 0; t < s.threads.size(); ++t) {
            if (can_issue(s, t)) {
                progressed = true;
                step(s, t);
            }
            const auto& window = s.threads[t].window;
            for (std::size_t i = 0; i < window.size(); ++i) {
                if (can_perform(window, i)) {
                    progressed = true;
                    perform(s, t, i);
                }
            }
        }
        if (!progressed && s.threads[kRootThread].finished) record(s);
    }

    void record(const State& s) {
        std::ostringstream key;
        for (auto v : s.values) key << v << ',';
        key << '|';
        for (auto n : s.violated) key << n << ',';
        key << '|';
        for (const auto& [l, st] : s.reads_from) key << l << '>' << st << ',';
        outcomes_.try_emplace(key.str(), Execution{s.trace, s.values, s.violated, s.reads_from});
    }

    const Program& p_;
    MemoryModel model_;
    Limits limits_;
    std::vector<VarIndex> globals_;
    std::set<NodeId> heads_;
    std::unordered_set<std::string> visited_;
    std::map<std::string, Execution> outcomes_;
    bool truncated_ = false;
};

} // namespace

Result enumerate(const Program& p, MemoryModel model, const Limits& limits) {
    return Explorer(p, model, limits).run();
}

std::map<NodeId, bool> violates(const Program& p, MemoryModel model, const Limits& limits) {
    std::map<NodeId, bool> out;
    for (const auto& node : p.nodes()) {
        if (std::holds_alternative<Assert>(node.instr)) out[node.id] = false;
    }
    for (const auto& e : enumerate(p, model, limits).executions) {
        for (NodeId n : e.violated) out[n] = true;
    }
    return out;
}

std::string format_trace(const Program& p, const Execution& e) {
    std::ostringstream out;
    bool first = true;
    for (const auto& ev : e.trace) {
        out << (first ? "" : "; ");
        first = false;
        if (ev.kind == Event::Kind::Store) {
            out << "flush " << p.var(ev.var).name << "=" << ev.value;
        } else {
            out << "read " << p.var(ev.var).name << "=" << ev.value;
        }
        out << " [" << p.graph(ev.thread).name << "]";
    }
    return out.str();
}

} // namespace relax::oracle
