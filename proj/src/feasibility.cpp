#include "relax/feasibility.hpp"

#include <algorithm>
#include <cctype>

namespace relax {

std::optional<MemoryModel> parse_model(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "sc") return MemoryModel::SC;
    if (lower == "tso") return MemoryModel::TSO;
    if (lower == "pso") return MemoryModel::PSO;
    if (lower == "rmo") return MemoryModel::RMO;
    return std::nullopt;
}

const char* to_string(MemoryModel m) {
    switch (m) {
    case MemoryModel::SC: return "SC";
    case MemoryModel::TSO: return "TSO";
    case MemoryModel::PSO: return "PSO";
    case MemoryModel::RMO: return "RMO";
    }
    return "?";
}

namespace {

bool model_keeps_order(const Program& p, MemoryModel model, NodeId a, NodeId b) {
    const auto la = p.loaded_var(a);
    const auto lb = p.loaded_var(b);
    const auto sa = p.stored_var(a);
    const auto sb = p.stored_var(b);
    switch (model) {
    case MemoryModel::SC: return true;
    case MemoryModel::TSO: return la || sb;
    case MemoryModel::PSO: return la || (sa && sb && *sa == *sb);
    case MemoryModel::RMO: {
        const VarIndex va = la ? *la : *sa;
        const VarIndex vb = lb ? *lb : *sb;
        return va == vb && !(sa && lb);
    }
    }
    return true;
}

bool membar_orders(std::uint8_t kinds, bool first_is_load, bool second_is_load) {
    if (first_is_load) return kinds & (second_is_load ? membar::LL : membar::LS);
    return kinds & (second_is_load ? membar::SL : membar::SS);
}

std::uint8_t membar_kinds(const Instruction& instr) {
    if (std::holds_alternative<Fence>(instr)) return membar::All;
    if (const auto* m = std::get_if<Membar>(&instr)) return m->kinds;
    return 0;
}

const char* const kRules[] = {
    "MHB(a,b) :- ThreadCreates(a,b).",
    "MHB(a,b) :- ThreadJoins(b,a).",
    "MHB(a,b) :- Dominates(a,b), NotReachableFrom(a,b), NoReorder(a,b).",
    "MHB(a,c) :- MHB(a,b), MHB(b,c).",
    "MHB(l,t) :- ReadsFrom(l,s), MHB(s,t), IsStore(s,v), IsStore(t,v).",
    "MustNotReadFrom(l,s) :- MHB(l,s), IsLoad(l,v), IsStore(s,v), NoForward(l,s).",
    "MustNotReadFrom(k,s) :- ReadsFrom(l,s), Once(s), NoForward(l,s), MHB(l,t), IsStore(t,v), IsStore(s,v), "
    "MHB(t,k), IsLoad(k,v), NoForward(k,s).",
};

constexpr NodeId kEntryMarker = ~NodeId{0};

} // namespace

std::set<NodeId> cyclic_nodes(const Program& p) {
    std::set<NodeId> out;
    for (const auto& g : p.threads()) {
        const auto nrf = compute_not_reachable_from(p, g);
        for (NodeId n : g.nodes) {
            if (!nrf.contains({n, n})) out.insert(n);
        }
    }
    return out;
}

PairSet compute_no_reorder(const Program& p, MemoryModel model) {
    PairSet out;
    for (const auto& g : p.threads()) {
        const auto po = compute_program_order(p, g);
        for (auto [a, b] : po) {
            const bool sync_a = is_sync_node(p, a);
            const bool sync_b = is_sync_node(p, b);
            const bool access_a = p.is_access(a);
            const bool access_b = p.is_access(b);
            if (!(sync_a || access_a) || !(sync_b || access_b)) continue;
            if (sync_a || sync_b || model_keeps_order(p, model, a, b)) out.emplace(a, b);
        }
        const auto dom = compute_dominates(p, g);
        for (NodeId m : g.nodes) {
            const auto kinds = membar_kinds(p.instr(m));
            if (!kinds) continue;
            for (NodeId a : g.nodes) {
                if (!p.is_access(a) || !dom.contains({a, m})) continue;
                for (NodeId b : g.nodes) {
                    if (!p.is_access(b) || !dom.contains({m, b})) continue;
                    if (membar_orders(kinds, p.loaded_var(a).has_value(), p.loaded_var(b).has_value())) {
                        out.emplace(a, b);
                    }
                }
            }
        }
    }
    return out;
}

FeasibilityChecker::FeasibilityChecker(const Program& p, MemoryModel model)
    : program_(p), model_(model), db_(extract_relations(p)), no_reorder_(compute_no_reorder(p, model)),
      cyclic_(cyclic_nodes(p)) {
    const auto no_reorder = db_.id(rel::NoReorder);
    for (auto [a, b] : no_reorder_) db_.insert(no_reorder, a, b);

    const auto once = db_.declare("Once", 1);
    for (const auto& node : p.nodes()) {
        if (!cyclic_.contains(node.id)) db_.insert(once, node.id);
    }

    // A load may take its value from a program-order-earlier own store that
    // is not yet visible to other threads; happens-before facts about global
    // visibility say nothing about such pairs.
    const auto no_forward = db_.declare("NoForward", 2);
    std::map<ThreadId, PairSet> po;
    for (const auto& g : p.threads()) po[g.id] = compute_program_order(p, g);
    for (const auto& l : p.nodes()) {
        const auto v = p.loaded_var(l.id);
        if (!v) continue;
        for (const auto& s : p.nodes()) {
            if (p.stored_var(s.id) != v) continue;
            const bool forwardable = s.thread == l.thread && po[l.thread].contains({s.id, l.id});
            if (!forwardable) db_.insert(no_forward, l.id, s.id);
        }
    }

    for (const auto& g : p.threads()) {
        for (auto pair : compute_dominates(p, g)) dominates_.insert(pair);
    }

    for (const char* text : kRules) rules_.push_back(db_.parse_rule(text));
    db_.evaluate(rules_);
    base_ = db_.mark();
    for (const auto& t : db_.rel(rel::MustNotReadFrom).rows()) base_mnrf_.emplace(t[0], t[1]);
}

bool FeasibilityChecker::dominates(NodeId a, NodeId b) const { return dominates_.contains({a, b}); }

bool FeasibilityChecker::refuted_without_facts(NodeId load, NodeId store) const {
    return base_mnrf_.contains({load, store});
}

void FeasibilityChecker::query(const std::vector<NodePair>& reads_from) {
    db_.truncate(base_);
    const auto rf = db_.id(rel::ReadsFrom);
    for (auto [l, s] : reads_from) db_.insert(rf, l, s);
    db_.evaluate(rules_, base_);
}

PairSet FeasibilityChecker::mhb(const std::vector<NodePair>& reads_from) {
    query(reads_from);
    PairSet out;
    for (const auto& t : db_.rel(rel::MHB).rows()) out.emplace(t[0], t[1]);
    return out;
}

PairSet FeasibilityChecker::must_not_read_from(const std::vector<NodePair>& reads_from) {
    query(reads_from);
    PairSet out;
    for (const auto& t : db_.rel(rel::MustNotReadFrom).rows()) out.emplace(t[0], t[1]);
    return out;
}

FeasibilityResult FeasibilityChecker::check(const std::vector<NodePair>& reads_from) {
    std::vector<NodePair> facts = reads_from;
    std::sort(facts.begin(), facts.end());
    facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
    for (std::size_t i = 1; i < facts.size(); ++i) {
        if (facts[i].first == facts[i - 1].first) return FeasibilityResult{false, facts[i]};
    }
    query(facts);
    const auto& mnrf = db_.rel(rel::MustNotReadFrom);
    for (const auto& f : facts) {
        if (mnrf.contains({f.first, f.second, 0})) return FeasibilityResult{false, f};
    }
    return FeasibilityResult{};
}

std::vector<NodePair> FeasibilityChecker::facts_of(const InterferenceCombination& ic) const {
    std::vector<NodePair> facts;
    for (const auto& [load, choice] : ic) {
        if (load >= program_.nodes().size()) throw ContractViolation("combination key is not a node");
        const auto v = program_.loaded_var(load);
        if (!v) throw ContractViolation("combination key " + std::to_string(load) + " is not a load");
        std::optional<NodeId> source;
        if (const auto* remote = std::get_if<RemoteStore>(&choice)) {
            if (remote->store >= program_.nodes().size() || program_.stored_var(remote->store) != v) {
                throw ContractViolation("store " + std::to_string(remote->store) + " does not write the variable load " +
                                        std::to_string(load) + " reads");
            }
            const auto& sn = program_.node(remote->store);
            if (sn.thread == program_.thread_of(load) && !sn.virtual_init) {
                throw ContractViolation("store " + std::to_string(remote->store) + " is in the same thread as load " +
                                        std::to_string(load));
            }
            source = remote->store;
        } else {
            source = sequential_source(load);
        }
        if (source && !on_cycle(load)) facts.emplace_back(load, *source);
    }
    return facts;
}

FeasibilityResult FeasibilityChecker::check(const InterferenceCombination& ic) {
    auto facts = facts_of(ic);
    for (const auto& [load, choice] : ic) {
        if (const auto* remote = std::get_if<RemoteStore>(&choice)) {
            facts.insert(facts.end(), remote->provenance.begin(), remote->provenance.end());
        }
    }
    return check(facts);
}

std::optional<NodeId> FeasibilityChecker::sequential_source(NodeId load) const {
    if (auto it = sequential_source_.find(load); it != sequential_source_.end()) return it->second;

    const auto v = program_.loaded_var(load);
    if (!v) throw ContractViolation("node " + std::to_string(load) + " is not a load");
    const auto& g = program_.graph(program_.thread_of(load));

    // Reaching definitions of v within the thread; the marker stands for the
    // value the thread started with.
    std::map<NodeId, std::set<NodeId>> out;
    const auto in_of = [&](NodeId n) {
        std::set<NodeId> in;
        if (n == g.entry) in.insert(kEntryMarker);
        for (NodeId pr : program_.preds(n)) {
            const auto& o = out[pr];
            in.insert(o.begin(), o.end());
        }
        return in;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (NodeId n : g.nodes) {
            std::set<NodeId> next = program_.stored_var(n) == v ? std::set<NodeId>{n} : in_of(n);
            if (next != out[n]) {
                out[n] = std::move(next);
                changed = true;
            }
        }
    }
    const auto reaching = in_of(load);
    std::optional<NodeId> result;
    if (reaching.size() == 1) {
        const NodeId only = *reaching.begin();
        result = only == kEntryMarker ? program_.init_store(*v) : std::optional<NodeId>(only);
    }
    sequential_source_[load] = result;
    return result;
}

std::string FeasibilityChecker::dump() {
    db_.truncate(base_);
    return dump_relations(db_, program_);
}

PairSet deduce_mhb(const Program& p, MemoryModel model, const std::vector<NodePair>& reads_from) {
    return FeasibilityChecker(p, model).mhb(reads_from);
}

PairSet deduce_must_not_read_from(const Program& p, MemoryModel model, const std::vector<NodePair>& reads_from) {
    return FeasibilityChecker(p, model).must_not_read_from(reads_from);
}

FeasibilityResult check_feasible(const Program& p, MemoryModel model, const InterferenceCombination& ic) {
    return FeasibilityChecker(p, model).check(ic);
}

} // namespace relax
