#include "relax/relations.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace relax {

namespace {

// Local indexing of one thread's nodes for the bit-matrix computations.
struct LocalGraph {
    std::vector<NodeId> ids;
    std::map<NodeId, std::size_t> pos;
    std::vector<std::vector<std::size_t>> succ;
    std::vector<std::vector<std::size_t>> pred;
    std::size_t entry = 0;

    LocalGraph(const Program& p, const FlowGraph& g) : ids(g.nodes) {
        for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = i;
        succ.resize(ids.size());
        pred.resize(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (NodeId s : p.succs(ids[i])) {
                succ[i].push_back(pos.at(s));
                pred[pos.at(s)].push_back(i);
            }
        }
        entry = pos.at(g.entry);
    }

    // reach[a][b]: b reachable from a by a path of length >= 1.
    std::vector<std::vector<bool>> reachability() const {
        const std::size_t n = ids.size();
        std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
        for (std::size_t a = 0; a < n; ++a) {
            std::vector<std::size_t> stack(succ[a].begin(), succ[a].end());
            while (!stack.empty()) {
                const auto x = stack.back();
                stack.pop_back();
                if (reach[a][x]) continue;
                reach[a][x] = true;
                for (auto y : succ[x]) stack.push_back(y);
            }
        }
        return reach;
    }
};

} // namespace

PairSet compute_dominates(const Program& p, const FlowGraph& g) {
    const LocalGraph lg(p, g);
    const std::size_t n = lg.ids.size();
    std::vector<std::vector<bool>> dom(n, std::vector<bool>(n, true));
    dom[lg.entry].assign(n, false);
    dom[lg.entry][lg.entry] = true;

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t b = 0; b < n; ++b) {
            if (b == lg.entry) continue;
            std::vector<bool> next(n, true);
            if (lg.pred[b].empty()) next.assign(n, false);
            for (auto pr : lg.pred[b]) {
                for (std::size_t a = 0; a < n; ++a) next[a] = next[a] && dom[pr][a];
            }
            next[b] = true;
            if (next != dom[b]) {
                dom[b] = std::move(next);
                changed = true;
            }
        }
    }

    PairSet out;
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t a = 0; a < n; ++a) {
            if (a != b && dom[b][a]) out.emplace(lg.ids[a], lg.ids[b]);
        }
    }
    return out;
}

PairSet compute_not_reachable_from(const Program& p, const FlowGraph& g) {
    const LocalGraph lg(p, g);
    const auto reach = lg.reachability();
    PairSet out;
    for (std::size_t a = 0; a < lg.ids.size(); ++a) {
        for (std::size_t b = 0; b < lg.ids.size(); ++b) {
            if (!reach[b][a]) out.emplace(lg.ids[a], lg.ids[b]);
        }
    }
    return out;
}

PairSet compute_program_order(const Program& p, const FlowGraph& g) {
    const LocalGraph lg(p, g);
    const auto reach = lg.reachability();
    PairSet out;
    for (std::size_t a = 0; a < lg.ids.size(); ++a) {
        for (std::size_t b = 0; b < lg.ids.size(); ++b) {
            if (a != b && reach[a][b]) out.emplace(lg.ids[a], lg.ids[b]);
        }
    }
    return out;
}

ThreadEdges compute_thread_edges(const Program& p) {
    ThreadEdges out;
    for (const auto& node : p.nodes()) {
        if (const auto* c = std::get_if<ThreadCreate>(&node.instr)) {
            out.creates.emplace(node.id, p.graph(c->child).entry);
        } else if (const auto* j = std::get_if<ThreadJoin>(&node.instr)) {
            out.joins.emplace(node.id, p.graph(j->child).exit);
        }
    }
    return out;
}

bool is_sync_node(const Program& p, NodeId n) {
    const auto& instr = p.instr(n);
    if (std::holds_alternative<Fence>(instr) || std::holds_alternative<ThreadCreate>(instr) ||
        std::holds_alternative<ThreadJoin>(instr)) {
        return true;
    }
    const auto& g = p.graph(p.thread_of(n));
    return n == g.entry || n == g.exit;
}

datalog::Database extract_relations(const Program& p) {
    datalog::Database db;
    const auto is_load = db.declare(rel::IsLoad, 2);
    const auto is_store = db.declare(rel::IsStore, 2);
    const auto is_fence = db.declare(rel::IsFence, 1);
    const auto ll = db.declare(rel::IsLLMembar, 1);
    const auto ls = db.declare(rel::IsLSMembar, 1);
    const auto sl = db.declare(rel::IsSLMembar, 1);
    const auto ss = db.declare(rel::IsSSMembar, 1);
    const auto dominates = db.declare(rel::Dominates, 2);
    const auto nrf = db.declare(rel::NotReachableFrom, 2);
    const auto creates = db.declare(rel::ThreadCreates, 2);
    const auto joins = db.declare(rel::ThreadJoins, 2);
    const auto po = db.declare(rel::ProgramOrder, 2);
    const auto is_access = db.declare(rel::IsAccess, 1);
    const auto is_sync = db.declare(rel::IsSync, 1);
    const auto is_event = db.declare(rel::IsEvent, 1);
    db.declare(rel::NoReorder, 2);
    db.declare(rel::MHB, 2);
    db.declare(rel::ReadsFrom, 2);
    db.declare(rel::MustNotReadFrom, 2);

    for (const auto& node : p.nodes()) {
        const NodeId n = node.id;
        if (auto v = p.loaded_var(n)) db.insert(is_load, n, *v);
        if (auto v = p.stored_var(n)) db.insert(is_store, n, *v);
        std::uint8_t kinds = 0;
        if (std::holds_alternative<Fence>(node.instr)) {
            db.insert(is_fence, n);
            kinds = membar::All;
        } else if (const auto* m = std::get_if<Membar>(&node.instr)) {
            kinds = m->kinds;
        }
        if (kinds & membar::LL) db.insert(ll, n);
        if (kinds & membar::LS) db.insert(ls, n);
        if (kinds & membar::SL) db.insert(sl, n);
        if (kinds & membar::SS) db.insert(ss, n);
        const bool access = p.is_access(n);
        const bool sync = is_sync_node(p, n);
        if (access) db.insert(is_access, n);
        if (sync) db.insert(is_sync, n);
        if (access || sync) db.insert(is_event, n);
    }
    for (const auto& g : p.threads()) {
        for (auto [a, b] : compute_dominates(p, g)) db.insert(dominates, a, b);
        for (auto [a, b] : compute_not_reachable_from(p, g)) db.insert(nrf, a, b);
        for (auto [a, b] : compute_program_order(p, g)) db.insert(po, a, b);
    }
    const auto edges = compute_thread_edges(p);
    for (auto [a, b] : edges.creates) db.insert(creates, a, b);
    for (auto [a, b] : edges.joins) db.insert(joins, a, b);
    return db;
}

std::string dump_relations(const datalog::Database& db, const Program& p) {
    std::ostringstream out;
    for (datalog::RelId r = 0; r < db.relation_count(); ++r) {
        const auto& relation = db.rel(r);
        const bool var_column = relation.name() == rel::IsLoad || relation.name() == rel::IsStore;
        std::vector<datalog::Tuple> rows = relation.rows();
        std::sort(rows.begin(), rows.end());
        for (const auto& t : rows) {
            out << relation.name() << "(" << t[0];
            for (std::size_t i = 1; i < relation.arity(); ++i) {
                out << ",";
                if (var_column && i == 1) {
                    out << p.var(t[i]).name;
                } else {
                    out << t[i];
                }
            }
            out << ")\n";
        }
    }
    return out.str();
}

} // namespace relax
