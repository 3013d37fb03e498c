#include "relax/ir.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace relax {

ExprPtr Expr::constant(std::int64_t v) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Const;
    e->value = v;
    return e;
}

ExprPtr Expr::variable(VarIndex v) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Var;
    e->var = v;
    return e;
}

ExprPtr Expr::neg(ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Neg;
    e->lhs = std::move(a);
    return e;
}

ExprPtr Expr::binary(Op op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

CmpOp negate(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
    }
    return op;
}

CmpOp swap_sides(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Ge: return CmpOp::Le;
    default: return op;
    }
}

const char* to_string(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    }
    return "?";
}

CondPtr Cond::compare(CmpOp op, ExprPtr a, ExprPtr b) {
    auto c = std::make_shared<Cond>();
    c->op = Op::Cmp;
    c->cmp = op;
    c->a = std::move(a);
    c->b = std::move(b);
    return c;
}

CondPtr Cond::conj(CondPtr a, CondPtr b) {
    auto c = std::make_shared<Cond>();
    c->op = Op::And;
    c->lhs = std::move(a);
    c->rhs = std::move(b);
    return c;
}

CondPtr Cond::disj(CondPtr a, CondPtr b) {
    auto c = std::make_shared<Cond>();
    c->op = Op::Or;
    c->lhs = std::move(a);
    c->rhs = std::move(b);
    return c;
}

CondPtr Cond::negation(CondPtr inner) {
    auto c = std::make_shared<Cond>();
    c->op = Op::Not;
    c->lhs = std::move(inner);
    return c;
}

void collect_vars(const Expr& e, std::set<VarIndex>& out) {
    if (e.op == Expr::Op::Var) {
        out.insert(e.var);
    }
    if (e.lhs) collect_vars(*e.lhs, out);
    if (e.rhs) collect_vars(*e.rhs, out);
}

void collect_vars(const Cond& c, std::set<VarIndex>& out) {
    if (c.op == Cond::Op::Cmp) {
        collect_vars(*c.a, out);
        collect_vars(*c.b, out);
        return;
    }
    if (c.lhs) collect_vars(*c.lhs, out);
    if (c.rhs) collect_vars(*c.rhs, out);
}

std::optional<std::int64_t> evaluate(const Expr& e, const ValueLookup& lookup) {
    switch (e.op) {
    case Expr::Op::Const: return e.value;
    case Expr::Op::Var: return lookup(e.var);
    case Expr::Op::Neg: {
        auto a = evaluate(*e.lhs, lookup);
        if (!a) return std::nullopt;
        return -*a;
    }
    default: break;
    }
    auto a = evaluate(*e.lhs, lookup);
    auto b = evaluate(*e.rhs, lookup);
    if (!a || !b) return std::nullopt;
    // Two's complement wrap-around; corpus programs stay far from it.
    auto ua = static_cast<std::uint64_t>(*a);
    auto ub = static_cast<std::uint64_t>(*b);
    switch (e.op) {
    case Expr::Op::Add: return static_cast<std::int64_t>(ua + ub);
    case Expr::Op::Sub: return static_cast<std::int64_t>(ua - ub);
    case Expr::Op::Mul: return static_cast<std::int64_t>(ua * ub);
    default: return std::nullopt;
    }
}

static bool compare(CmpOp op, std::int64_t a, std::int64_t b) {
    switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
    }
    return false;
}

std::optional<bool> evaluate(const Cond& c, const ValueLookup& lookup) {
    switch (c.op) {
    case Cond::Op::Cmp: {
        auto a = evaluate(*c.a, lookup);
        auto b = evaluate(*c.b, lookup);
        if (!a || !b) return std::nullopt;
        return compare(c.cmp, *a, *b);
    }
    case Cond::Op::Not: {
        auto v = evaluate(*c.lhs, lookup);
        if (!v) return std::nullopt;
        return !*v;
    }
    case Cond::Op::And: {
        auto a = evaluate(*c.lhs, lookup);
        auto b = evaluate(*c.rhs, lookup);
        if ((a && !*a) || (b && !*b)) return false;
        if (!a || !b) return std::nullopt;
        return true;
    }
    case Cond::Op::Or: {
        auto a = evaluate(*c.lhs, lookup);
        auto b = evaluate(*c.rhs, lookup);
        if ((a && *a) || (b && *b)) return true;
        if (!a || !b) return std::nullopt;
        return false;
    }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Program
// ---------------------------------------------------------------------------

std::vector<VarIndex> Program::globals() const {
    std::vector<VarIndex> out;
    for (VarIndex v = 0; v < vars_.size(); ++v) {
        if (vars_[v].kind == VarKind::Global) out.push_back(v);
    }
    return out;
}

std::optional<VarIndex> Program::find_var(const std::string& name, std::optional<ThreadId> owner) const {
    for (VarIndex v = 0; v < vars_.size(); ++v) {
        const auto& info = vars_[v];
        if (info.name != name) continue;
        if (info.kind == VarKind::Global && !owner) return v;
        if (info.kind == VarKind::Local && owner && info.owner == *owner) return v;
    }
    return std::nullopt;
}

std::optional<NodeId> Program::init_store(VarIndex global) const {
    auto it = init_stores_.find(global);
    if (it == init_stores_.end()) return std::nullopt;
    return it->second;
}

std::optional<VarIndex> Program::loaded_var(NodeId n) const {
    if (const auto* ld = std::get_if<Load>(&nodes_.at(n).instr)) return ld->src;
    return std::nullopt;
}

std::optional<VarIndex> Program::stored_var(NodeId n) const {
    if (const auto* st = std::get_if<Store>(&nodes_.at(n).instr)) return st->dst;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// ProgramBuilder
// ---------------------------------------------------------------------------

VarIndex ProgramBuilder::add_global(const std::string& name, std::int64_t initial) {
    vars_.push_back(VarInfo{name, VarKind::Global, kRootThread, initial});
    return static_cast<VarIndex>(vars_.size() - 1);
}

VarIndex ProgramBuilder::add_local(const std::string& name, ThreadId owner) {
    vars_.push_back(VarInfo{name, VarKind::Local, owner, 0});
    return static_cast<VarIndex>(vars_.size() - 1);
}

ThreadId ProgramBuilder::add_thread(const std::string& name, bool epilogue) {
    threads_.push_back(PendingThread{name, epilogue, std::nullopt, std::nullopt});
    return static_cast<ThreadId>(threads_.size());
}

NodeId ProgramBuilder::add_node(ThreadId t, Instruction instr) {
    if (t == kRootThread || t > threads_.size()) {
        throw std::logic_error("add_node: unknown thread");
    }
    nodes_.push_back(PendingNode{t, std::move(instr)});
    return static_cast<NodeId>(nodes_.size() - 1);
}

void ProgramBuilder::add_edge(NodeId from, NodeId to) { edges_.emplace_back(from, to); }

void ProgramBuilder::set_entry(ThreadId t, NodeId n) { threads_.at(t - 1).entry = n; }

void ProgramBuilder::set_exit(ThreadId t, NodeId n) { threads_.at(t - 1).exit = n; }

Program ProgramBuilder::build() const {
    Program p;
    p.vars_ = vars_;

    std::set<ThreadId> explicitly_created;
    for (const auto& pn : nodes_) {
        if (const auto* c = std::get_if<ThreadCreate>(&pn.instr)) explicitly_created.insert(c->child);
    }
    std::vector<ThreadId> top_level;
    std::optional<ThreadId> epilogue;
    for (ThreadId t = 1; t <= threads_.size(); ++t) {
        if (threads_[t - 1].epilogue) {
            epilogue = t;
        } else if (!explicitly_created.contains(t)) {
            top_level.push_back(t);
        }
    }

    // Root thread, laid out as a straight line.
    FlowGraph root;
    root.id = kRootThread;
    root.name = "<root>";
    auto emit_root = [&](Instruction instr, bool is_init = false) {
        const auto id = static_cast<NodeId>(p.nodes_.size());
        p.nodes_.push_back(Node{id, kRootThread, std::move(instr), is_init});
        if (!root.nodes.empty()) root.edges.emplace_back(root.nodes.back(), id);
        root.nodes.push_back(id);
        return id;
    };
    root.entry = emit_root(Nop{});
    for (VarIndex v = 0; v < vars_.size(); ++v) {
        if (vars_[v].kind != VarKind::Global) continue;
        p.init_stores_[v] = emit_root(Store{v, Expr::constant(vars_[v].initial)}, true);
    }
    for (ThreadId t : top_level) emit_root(ThreadCreate{t});
    for (ThreadId t : top_level) emit_root(ThreadJoin{t});
    if (epilogue) {
        emit_root(ThreadCreate{*epilogue});
        emit_root(ThreadJoin{*epilogue});
    }
    root.exit = emit_root(Nop{});
    p.threads_.push_back(std::move(root));

    // User nodes, grouped by thread in declaration order.
    const auto base = static_cast<NodeId>(p.nodes_.size());
    std::vector<NodeId> order(nodes_.size());
    for (NodeId i = 0; i < nodes_.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return nodes_[a].thread < nodes_[b].thread; });
    std::vector<NodeId> remap(nodes_.size());
    for (NodeId rank = 0; rank < order.size(); ++rank) remap[order[rank]] = base + rank;

    for (NodeId rank = 0; rank < order.size(); ++rank) {
        const auto& pn = nodes_[order[rank]];
        p.nodes_.push_back(Node{base + rank, pn.thread, pn.instr, false});
    }
    for (ThreadId t = 1; t <= threads_.size(); ++t) {
        const auto& pt = threads_[t - 1];
        if (!pt.entry || !pt.exit) throw std::logic_error("thread '" + pt.name + "' has no entry or exit");
        FlowGraph g;
        g.id = t;
        g.name = pt.name;
        g.epilogue = pt.epilogue;
        g.entry = remap[*pt.entry];
        g.exit = remap[*pt.exit];
        for (const auto& n : p.nodes_) {
            if (n.id >= base && n.thread == t) g.nodes.push_back(n.id);
        }
        p.threads_.push_back(std::move(g));
    }
    for (const auto& [from, to] : edges_) {
        const NodeId f = remap.at(from);
        p.threads_.at(p.nodes_.at(f).thread).edges.emplace_back(f, remap.at(to));
    }

    p.succs_.assign(p.nodes_.size(), {});
    p.preds_.assign(p.nodes_.size(), {});
    for (const auto& g : p.threads_) {
        for (const auto& [from, to] : g.edges) {
            p.succs_.at(from).push_back(to);
            p.preds_.at(to).push_back(from);
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

std::set<VarIndex> vars_of(const Instruction& instr) {
    std::set<VarIndex> out;
    std::visit(overloaded{
                   [&](const Load& i) {
                       out.insert(i.dst);
                       out.insert(i.src);
                   },
                   [&](const Store& i) {
                       out.insert(i.dst);
                       collect_vars(*i.value, out);
                   },
                   [&](const LocalAssign& i) {
                       out.insert(i.dst);
                       collect_vars(*i.value, out);
                   },
                   [&](const Assume& i) { collect_vars(*i.cond, out); },
                   [&](const Assert& i) { collect_vars(*i.cond, out); },
                   [](const auto&) {},
               },
               instr);
    return out;
}

} // namespace

std::vector<Diagnostic> validate(const Program& program) {
    std::vector<Diagnostic> diags;
    auto report = [&](std::optional<NodeId> n, std::string why) { diags.push_back(Diagnostic{n, std::move(why)}); };
    const auto& vars = program.vars();
    const auto thread_count = program.threads().size();

    for (const auto& node : program.nodes()) {
        const auto& instr = node.instr;
        for (VarIndex v : vars_of(instr)) {
            if (v >= vars.size()) {
                report(node.id, "unknown variable index " + std::to_string(v));
                continue;
            }
            if (vars[v].kind == VarKind::Local && vars[v].owner != node.thread) {
                report(node.id, "local '" + vars[v].name + "' used outside its owner thread");
            }
        }
        auto is_global = [&](VarIndex v) { return v < vars.size() && vars[v].kind == VarKind::Global; };
        std::visit(overloaded{
                       [&](const Load& i) {
                           if (!is_global(i.src)) report(node.id, "load source is not a global");
                           if (is_global(i.dst)) report(node.id, "load destination is not a local");
                       },
                       [&](const Store& i) {
                           if (!is_global(i.dst)) report(node.id, "store destination is not a global");
                           std::set<VarIndex> used;
                           collect_vars(*i.value, used);
                           for (VarIndex v : used) {
                               if (is_global(v)) report(node.id, "store reads a global (not atomic)");
                           }
                       },
                       [&](const LocalAssign& i) {
                           std::set<VarIndex> used;
                           collect_vars(*i.value, used);
                           used.insert(i.dst);
                           for (VarIndex v : used) {
                               if (is_global(v)) report(node.id, "local assignment touches a global");
                           }
                       },
                       [&](const Assume& i) {
                           std::set<VarIndex> used;
                           collect_vars(*i.cond, used);
                           for (VarIndex v : used) {
                               if (is_global(v)) report(node.id, "assume condition mentions a global");
                           }
                       },
                       [&](const Assert& i) {
                           std::set<VarIndex> used;
                           collect_vars(*i.cond, used);
                           for (VarIndex v : used) {
                               if (is_global(v)) report(node.id, "assert condition mentions a global");
                           }
                       },
                       [&](const Membar& i) {
                           if ((i.kinds & membar::All) == 0) report(node.id, "membar with no kinds");
                       },
                       [&](const ThreadCreate& i) {
                           if (i.child == kRootThread || i.child >= thread_count)
                               report(node.id, "unknown thread " + std::to_string(i.child));
                       },
                       [&](const ThreadJoin& i) {
                           if (i.child == kRootThread || i.child >= thread_count)
                               report(node.id, "unknown thread " + std::to_string(i.child));
                       },
                       [](const auto&) {},
                   },
                   instr);
    }

    // Graph shape.
    for (const auto& g : program.threads()) {
        std::set<NodeId> members(g.nodes.begin(), g.nodes.end());
        for (const auto& [from, to] : g.edges) {
            if (!members.contains(from) || !members.contains(to)) {
                report(from, "edge leaves thread '" + g.name + "'");
            }
            if (to == g.entry) report(g.entry, "entry node of '" + g.name + "' has an incoming edge");
            if (from == g.exit) report(g.exit, "exit node of '" + g.name + "' has an outgoing edge");
        }
        std::set<NodeId> seen{g.entry};
        std::deque<NodeId> work{g.entry};
        while (!work.empty()) {
            const NodeId n = work.front();
            work.pop_front();
            for (NodeId s : program.succs(n)) {
                if (seen.insert(s).second) work.push_back(s);
            }
        }
        for (NodeId n : g.nodes) {
            if (!seen.contains(n)) report(n, "node unreachable from entry of '" + g.name + "'");
        }
    }

    // Creation structure: every non-root thread created exactly once, no cycles.
    std::map<ThreadId, std::vector<ThreadId>> children;
    std::map<ThreadId, int> creations;
    for (const auto& node : program.nodes()) {
        if (const auto* c = std::get_if<ThreadCreate>(&node.instr)) {
            if (c->child == kRootThread || c->child >= thread_count) continue;
            children[node.thread].push_back(c->child);
            ++creations[c->child];
        }
    }
    for (ThreadId t = 1; t < thread_count; ++t) {
        const auto count = creations[t];
        if (count == 0) report(std::nullopt, "thread '" + program.graph(t).name + "' is never created");
        if (count > 1) report(std::nullopt, "thread '" + program.graph(t).name + "' is created more than once");
    }
    std::map<ThreadId, int> color; // 0 white, 1 grey, 2 black
    std::function<void(ThreadId)> visit = [&](ThreadId t) {
        color[t] = 1;
        for (ThreadId c : children[t]) {
            if (color[c] == 1) {
                report(std::nullopt, "thread creation cycle through '" + program.graph(c).name + "'");
            } else if (color[c] == 0) {
                visit(c);
            }
        }
        color[t] = 2;
    };
    for (ThreadId t = 0; t < thread_count; ++t) {
        if (color[t] == 0) visit(t);
    }
    return diags;
}

std::size_t node_count(const Program& program) { return program.nodes().size(); }

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string to_string(const Expr& e, const Program& p) {
    switch (e.op) {
    case Expr::Op::Const: return std::to_string(e.value);
    case Expr::Op::Var: return p.var(e.var).name;
    case Expr::Op::Neg: return "-(" + to_string(*e.lhs, p) + ")";
    case Expr::Op::Add: return "(" + to_string(*e.lhs, p) + " + " + to_string(*e.rhs, p) + ")";
    case Expr::Op::Sub: return "(" + to_string(*e.lhs, p) + " - " + to_string(*e.rhs, p) + ")";
    case Expr::Op::Mul: return "(" + to_string(*e.lhs, p) + " * " + to_string(*e.rhs, p) + ")";
    }
    return "?";
}

std::string to_string(const Cond& c, const Program& p) {
    switch (c.op) {
    case Cond::Op::Cmp: return to_string(*c.a, p) + " " + to_string(c.cmp) + " " + to_string(*c.b, p);
    case Cond::Op::And: return "(" + to_string(*c.lhs, p) + " && " + to_string(*c.rhs, p) + ")";
    case Cond::Op::Or: return "(" + to_string(*c.lhs, p) + " || " + to_string(*c.rhs, p) + ")";
    case Cond::Op::Not: return "!(" + to_string(*c.lhs, p) + ")";
    }
    return "?";
}

static std::string membar_kinds(std::uint8_t k) {
    std::string out;
    if (k & membar::LL) out += " #LL";
    if (k & membar::LS) out += " #LS";
    if (k & membar::SL) out += " #SL";
    if (k & membar::SS) out += " #SS";
    return out;
}

std::string to_string(const Instruction& instr, const Program& p) {
    auto thread_name = [&](ThreadId t) {
        return t < p.threads().size() ? p.graph(t).name : "#" + std::to_string(t);
    };
    return std::visit(
        overloaded{
            [&](const Load& i) { return "load " + p.var(i.dst).name + " = " + p.var(i.src).name; },
            [&](const Store& i) { return "store " + p.var(i.dst).name + " = " + to_string(*i.value, p); },
            [&](const LocalAssign& i) { return p.var(i.dst).name + " = " + to_string(*i.value, p); },
            [](const Fence&) { return std::string("fence"); },
            [](const Membar& i) { return "membar" + membar_kinds(i.kinds); },
            [&](const Assume& i) { return "assume(" + to_string(*i.cond, p) + ")"; },
            [&](const Assert& i) { return "assert(" + to_string(*i.cond, p) + ")"; },
            [&](const ThreadCreate& i) { return "create(" + thread_name(i.child) + ")"; },
            [&](const ThreadJoin& i) { return "join(" + thread_name(i.child) + ")"; },
            [](const Nop&) { return std::string("nop"); },
        },
        instr);
}

std::string dump(const Program& p) {
    std::ostringstream out;
    for (const auto& g : p.threads()) {
        out << "thread " << g.name << " (entry " << g.entry << ", exit " << g.exit << ")\n";
        for (NodeId n : g.nodes) {
            out << "  " << n << ": " << to_string(p.instr(n), p);
            if (!p.succs(n).empty()) {
                out << "  ->";
                for (NodeId s : p.succs(n)) out << ' ' << s;
            }
            out << '\n';
        }
    }
    return out.str();
}

} // namespace relax
