#include "relax/analysis.hpp"

#include <algorithm>
#include <limits>

namespace relax {

Env initial_env(const Program& p) {
    Env env = Env::top();
    for (VarIndex v : p.globals()) env.set(v, Interval::constant(p.var(v).initial));
    return env;
}

namespace {

struct ThreadOrder {
    std::map<NodeId, std::size_t> rpo;
    std::set<NodeId> loop_heads;
};

ThreadOrder order_thread(const Program& p, const FlowGraph& g) {
    ThreadOrder out;
    std::vector<NodeId> postorder;
    std::set<NodeId> visited;
    std::set<NodeId> on_stack;
    // Iterative DFS: (node, index of next successor to explore).
    std::vector<std::pair<NodeId, std::size_t>> stack{{g.entry, 0}};
    visited.insert(g.entry);
    on_stack.insert(g.entry);
    while (!stack.empty()) {
        auto& [n, i] = stack.back();
        const auto& succs = p.succs(n);
        if (i < succs.size()) {
            const NodeId s = succs[i++];
            if (on_stack.contains(s)) {
                out.loop_heads.insert(s);
            } else if (visited.insert(s).second) {
                on_stack.insert(s);
                stack.emplace_back(s, 0);
            }
        } else {
            postorder.push_back(n);
            on_stack.erase(n);
            stack.pop_back();
        }
    }
    std::reverse(postorder.begin(), postorder.end());
    for (std::size_t i = 0; i < postorder.size(); ++i) out.rpo[postorder[i]] = i;
    return out;
}

Env transfer_node(const Program& p, NodeId n, const Env& in, const InterferenceCombination& ic,
                  const LoadFallback& fallback) {
    const auto* load = std::get_if<Load>(&p.instr(n));
    if (!load || in.is_bottom()) return transfer(p.instr(n), in);
    Interval value = in.get(load->src);
    if (auto it = ic.find(n); it != ic.end()) {
        if (const auto* remote = std::get_if<RemoteStore>(&it->second)) value = remote->env.get(load->src);
    } else if (auto fb = fallback.find(n); fb != fallback.end()) {
        value = value.join(fb->second);
    }
    Env out = in;
    out.set(load->dst, value);
    return out;
}

std::vector<NodeId> thread_loads(const Program& p, ThreadId t) {
    std::vector<NodeId> out;
    for (NodeId n : p.graph(t).nodes) {
        if (p.loaded_var(n)) out.push_back(n);
    }
    return out;
}

} // namespace

EnvMap analyze_tm(const Program& p, ThreadId t, const InterferenceCombination& ic, const LoadFallback& fallback) {
    const FlowGraph& g = p.graph(t);
    const ThreadOrder order = order_thread(p, g);
    EnvMap post(p.nodes().size(), Env::bottom());
    std::map<NodeId, Env> head_in;
    std::map<NodeId, int> visits;
    const Env init = initial_env(p);

    std::set<std::pair<std::size_t, NodeId>> worklist;
    worklist.emplace(order.rpo.at(g.entry), g.entry);
    while (!worklist.empty()) {
        const NodeId n = worklist.begin()->second;
        worklist.erase(worklist.begin());

        Env in = n == g.entry ? init : Env::bottom();
        for (NodeId pr : p.preds(n)) in = in.join(post[pr]);
        if (order.loop_heads.contains(n)) {
            auto [it, fresh] = head_in.try_emplace(n, Env::bottom());
            if (++visits[n] > 2) in = it->second.widen(it->second.join(in));
            it->second = in;
        }

        Env out = transfer_node(p, n, in, ic, fallback);
        if (out == post[n]) continue;
        post[n] = std::move(out);
        for (NodeId s : p.succs(n)) {
            if (auto r = order.rpo.find(s); r != order.rpo.end()) worklist.emplace(r->second, s);
        }
    }
    return post;
}

InterferenceSet interfs(const Program& p, ThreadId t, const InterferenceTable& table, FeasibilityChecker& checker) {
    InterferenceSet out;
    for (NodeId l : thread_loads(p, t)) {
        const VarIndex v = *p.loaded_var(l);
        const auto own = checker.sequential_source(l);
        auto& cands = out[l];
        for (const auto& [key, env] : table) {
            if (env.is_bottom() || p.stored_var(key.store) != v || p.thread_of(key.store) == t) continue;
            // The thread's own value already holds the initial value on every path where no own store
            // intervenes, and after an own store the initial value can no longer be read.
            if (p.node(key.store).virtual_init) continue;
            if (own == key.store && key.provenance.empty()) continue;
            cands.push_back(RemoteStore{key.store, env, key.provenance});
        }
    }
    return out;
}

Enumeration enumerate_combinations(const std::vector<NodeId>& loads, const InterferenceSet& candidates,
                                   std::size_t cap) {
    static const std::vector<RemoteStore> none;
    std::vector<const std::vector<RemoteStore>*> choices;
    std::size_t total = 1;
    for (NodeId l : loads) {
        auto it = candidates.find(l);
        const auto* c = it == candidates.end() ? &none : &it->second;
        choices.push_back(c);
        const std::size_t width = c->size() + 1;
        if (total > cap / width) return Enumeration{{}, true};
        total *= width;
    }
    if (total > cap) return Enumeration{{}, true};

    Enumeration out;
    out.combinations.reserve(total);
    std::vector<std::size_t> digit(loads.size(), 0);
    while (true) {
        InterferenceCombination ic;
        for (std::size_t i = 0; i < loads.size(); ++i) {
            if (digit[i] == 0) {
                ic.emplace(loads[i], NoInterference{});
            } else {
                ic.emplace(loads[i], (*choices[i])[digit[i] - 1]);
            }
        }
        out.combinations.push_back(std::move(ic));
        std::size_t i = loads.size();
        while (i > 0) {
            --i;
            if (++digit[i] <= choices[i]->size()) break;
            digit[i] = 0;
            if (i == 0) return out;
        }
        if (loads.empty()) return out;
    }
}

Interval loop_fallback_value(const Program& p, NodeId load, const std::vector<RemoteStore>& candidates,
                             const FeasibilityChecker& checker) {
    const VarIndex v = *p.loaded_var(load);
    Interval out = Interval::bottom();
    for (const auto& c : candidates) {
        if (!checker.refuted_without_facts(load, c.store)) out = out.join(c.env.get(v));
    }
    return out;
}

namespace {

template <class Map>
Map merge_widen(const Map& prev, const Map& next, bool widen) {
    Map out = prev;
    for (const auto& [k, env] : next) {
        auto [it, fresh] = out.try_emplace(k, env);
        if (fresh) continue;
        const Env joined = it->second.join(env);
        it->second = widen ? it->second.widen(joined) : joined;
    }
    return out;
}

EnvMap merge_widen(const EnvMap& prev, const EnvMap& next, bool widen) {
    EnvMap out = prev;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Env joined = out[i].join(next[i]);
        out[i] = widen ? out[i].widen(joined) : joined;
    }
    return out;
}

struct RoundResult {
    EnvMap envs;
    InterferenceTable table;
    std::map<NodeId, Verdict> verdicts;
    std::vector<ThreadStats> stats;
};

RoundResult run_round(const Program& p, const AnalysisOptions& options, const InterferenceTable& table,
                      FeasibilityChecker& checker) {
    RoundResult r;
    r.envs.assign(p.nodes().size(), Env::bottom());
    for (const auto& node : p.nodes()) {
        if (const auto* a = std::get_if<Assert>(&node.instr)) {
            r.verdicts[node.id] = Verdict{node.id, node.thread, a->location, a->line, options.model, true, {}};
        }
    }

    for (const auto& g : p.threads()) {
        ThreadStats ts;
        ts.thread = g.id;
        ts.name = g.name;
        const auto cands = interfs(p, g.id, table, checker);
        const auto loads = thread_loads(p, g.id);
        std::vector<NodeId> enumerated_loads;
        LoadFallback fallback;
        for (NodeId l : loads) {
            if (checker.on_cycle(l)) {
                fallback[l] = loop_fallback_value(p, l, cands.at(l), checker);
            } else {
                enumerated_loads.push_back(l);
            }
        }
        ts.loads = loads.size();
        ts.loop_loads = loads.size() - enumerated_loads.size();

        const auto record = [&](const EnvMap& envs, const InterferenceCombination& ic,
                                const std::vector<NodePair>& facts) {
            for (NodeId n : g.nodes) {
                r.envs[n] = r.envs[n].join(envs[n]);
                if (envs[n].is_bottom()) continue;
                if (p.stored_var(n)) {
                    StoreKey key{n, {}};
                    for (const auto& f : facts) {
                        if (checker.dominates(f.first, n)) key.provenance.push_back(f);
                    }
                    auto [it, fresh] = r.table.try_emplace(key, envs[n]);
                    if (!fresh) it->second = it->second.join(envs[n]);
                }
                if (const auto* a = std::get_if<Assert>(&p.instr(n))) {
                    auto& verdict = r.verdicts.at(n);
                    if (verdict.proved && may_be_false(*a->cond, envs[n])) {
                        verdict.proved = false;
                        verdict.witness = ic;
                    }
                }
            }
        };

        auto en = enumerate_combinations(enumerated_loads, cands, options.max_combinations);
        if (en.overflow) {
            ts.overflow = true;
            for (NodeId l : enumerated_loads) fallback[l] = loop_fallback_value(p, l, cands.at(l), checker);
            record(analyze_tm(p, g.id, {}, fallback), {}, {});
        } else {
            for (const auto& ic : en.combinations) {
                ++ts.enumerated;
                if (!checker.check(ic).feasible) {
                    ++ts.pruned;
                    continue;
                }
                auto facts = checker.facts_of(ic);
                std::sort(facts.begin(), facts.end());
                record(analyze_tm(p, g.id, ic, fallback), ic, facts);
            }
        }
        r.stats.push_back(std::move(ts));
    }
    return r;
}

} // namespace

AnalysisResult analyze_all(const Program& p, const AnalysisOptions& options) {
    FeasibilityChecker checker(p, options.model);
    AnalysisResult result;
    result.stats.threads = p.threads().size();
    result.stats.nodes = p.nodes().size();

    InterferenceTable table;
    EnvMap envs(p.nodes().size(), Env::bottom());
    for (std::size_t round = 1;; ++round) {
        RoundResult r = run_round(p, options, table, checker);
        for (const auto& ts : r.stats) {
            result.stats.enumerated_all_rounds += ts.enumerated;
            result.stats.pruned_all_rounds += ts.pruned;
        }
        const bool widen = round > options.widen_after_round;
        InterferenceTable next_table = merge_widen(table, r.table, widen);
        EnvMap next_envs = merge_widen(envs, r.envs, widen);
        const bool stable = next_table == table && next_envs == envs;
        table = std::move(next_table);
        envs = std::move(next_envs);
        result.round_envs.push_back(envs);

        if (stable) {
            result.stats.rounds = round;
            result.stats.per_thread = std::move(r.stats);
            for (const auto& ts : result.stats.per_thread) {
                result.stats.enumerated += ts.enumerated;
                result.stats.pruned += ts.pruned;
            }
            for (auto& [node, verdict] : r.verdicts) result.verdicts.push_back(std::move(verdict));
            break;
        }
    }
    result.envs = std::move(envs);
    return result;
}

} // namespace relax
