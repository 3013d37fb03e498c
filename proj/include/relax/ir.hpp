#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace relax {

using NodeId = std::uint32_t;
using ThreadId = std::uint32_t;
using VarIndex = std::uint32_t;

inline constexpr ThreadId kRootThread = 0;

enum class VarKind { Global, Local };

struct VarInfo {
    std::string name;
    VarKind kind = VarKind::Global;
    ThreadId owner = kRootThread; // locals only
    std::int64_t initial = 0;     // globals only
};

// ---------------------------------------------------------------------------
// Pure expressions and conditions over variables and integer constants.
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Op { Const, Var, Neg, Add, Sub, Mul };
    Op op = Op::Const;
    std::int64_t value = 0;
    VarIndex var = 0;
    ExprPtr lhs;
    ExprPtr rhs;

    static ExprPtr constant(std::int64_t v);
    static ExprPtr variable(VarIndex v);
    static ExprPtr neg(ExprPtr e);
    static ExprPtr binary(Op op, ExprPtr a, ExprPtr b);
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

CmpOp negate(CmpOp op);
// a op b  <=>  b (swap(op)) a
CmpOp swap_sides(CmpOp op);
const char* to_string(CmpOp op);

struct Cond;
using CondPtr = std::shared_ptr<const Cond>;

struct Cond {
    enum class Op { Cmp, And, Or, Not };
    Op op = Op::Cmp;
    CmpOp cmp = CmpOp::Eq;
    ExprPtr a;
    ExprPtr b;
    CondPtr lhs;
    CondPtr rhs;

    static CondPtr compare(CmpOp op, ExprPtr a, ExprPtr b);
    static CondPtr conj(CondPtr a, CondPtr b);
    static CondPtr disj(CondPtr a, CondPtr b);
    static CondPtr negation(CondPtr c);
};

void collect_vars(const Expr& e, std::set<VarIndex>& out);
void collect_vars(const Cond& c, std::set<VarIndex>& out);

// Concrete evaluation. The lookup returns nullopt for an unknown value, which
// propagates to the result.
using ValueLookup = std::function<std::optional<std::int64_t>(VarIndex)>;
std::optional<std::int64_t> evaluate(const Expr& e, const ValueLookup& lookup);
std::optional<bool> evaluate(const Cond& c, const ValueLookup& lookup);

// ---------------------------------------------------------------------------
// Atomic instructions.
// ---------------------------------------------------------------------------

namespace membar {
inline constexpr std::uint8_t LL = 1;
inline constexpr std::uint8_t LS = 2;
inline constexpr std::uint8_t SL = 4;
inline constexpr std::uint8_t SS = 8;
inline constexpr std::uint8_t All = LL | LS | SL | SS;
} // namespace membar

struct Load {
    VarIndex dst; // local
    VarIndex src; // global
};
struct Store {
    VarIndex dst; // global
    ExprPtr value;
};
struct LocalAssign {
    VarIndex dst;
    ExprPtr value;
};
struct Fence {};
struct Membar {
    std::uint8_t kinds = 0;
};
struct Assume {
    CondPtr cond;
};
struct Assert {
    CondPtr cond;
    std::string location;
    int line = 0;
};
struct ThreadCreate {
    ThreadId child;
};
struct ThreadJoin {
    ThreadId child;
};
struct Nop {};

using Instruction =
    std::variant<Load, Store, LocalAssign, Fence, Membar, Assume, Assert, ThreadCreate, ThreadJoin, Nop>;

struct Node {
    NodeId id = 0;
    ThreadId thread = 0;
    Instruction instr;
    bool virtual_init = false; // root-thread store of a global's initial value
};

struct FlowGraph {
    ThreadId id = 0;
    std::string name;
    std::vector<NodeId> nodes;
    NodeId entry = 0;
    NodeId exit = 0;
    std::vector<std::pair<NodeId, NodeId>> edges;
    bool epilogue = false;
};

struct Diagnostic {
    std::optional<NodeId> node;
    std::string reason;
};

class Program {
  public:
    const std::vector<VarInfo>& vars() const { return vars_; }
    const VarInfo& var(VarIndex v) const { return vars_.at(v); }
    std::vector<VarIndex> globals() const;
    std::optional<VarIndex> find_var(const std::string& name, std::optional<ThreadId> owner = {}) const;

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(NodeId n) const { return nodes_.at(n); }
    const Instruction& instr(NodeId n) const { return nodes_.at(n).instr; }
    ThreadId thread_of(NodeId n) const { return nodes_.at(n).thread; }

    const std::vector<FlowGraph>& threads() const { return threads_; }
    const FlowGraph& graph(ThreadId t) const { return threads_.at(t); }
    const FlowGraph& root() const { return threads_.at(kRootThread); }

    const std::vector<NodeId>& succs(NodeId n) const { return succs_.at(n); }
    const std::vector<NodeId>& preds(NodeId n) const { return preds_.at(n); }

    // Virtual store of the global's initial value in the root thread.
    std::optional<NodeId> init_store(VarIndex global) const;

    std::optional<VarIndex> loaded_var(NodeId n) const;
    std::optional<VarIndex> stored_var(NodeId n) const;
    bool is_access(NodeId n) const { return loaded_var(n) || stored_var(n); }

  private:
    friend class ProgramBuilder;
    std::vector<VarInfo> vars_;
    std::vector<Node> nodes_;
    std::vector<FlowGraph> threads_;
    std::vector<std::vector<NodeId>> succs_;
    std::vector<std::vector<NodeId>> preds_;
    std::map<VarIndex, NodeId> init_stores_;
};

// Incremental construction of a Program. User threads are added with local
// node handles; build() synthesizes the root thread (initial-value stores,
// creation and joining of every thread nobody else creates, then the epilogue
// thread if any) and assigns canonical node ids: root first, then threads in
// declaration order, nodes in insertion order.
class ProgramBuilder {
  public:
    VarIndex add_global(const std::string& name, std::int64_t initial = 0);
    VarIndex add_local(const std::string& name, ThreadId owner);

    // Thread ids are assigned in call order starting at 1 (0 is the root).
    ThreadId add_thread(const std::string& name, bool epilogue = false);
    NodeId add_node(ThreadId t, Instruction instr);
    void add_edge(NodeId from, NodeId to);
    void set_entry(ThreadId t, NodeId n);
    void set_exit(ThreadId t, NodeId n);

    std::size_t thread_count() const { return threads_.size(); }
    const VarInfo& var(VarIndex v) const { return vars_.at(v); }
    std::size_t var_count() const { return vars_.size(); }

    Program build() const;

  private:
    struct PendingNode {
        ThreadId thread;
        Instruction instr;
    };
    struct PendingThread {
        std::string name;
        bool epilogue = false;
        std::optional<NodeId> entry;
        std::optional<NodeId> exit;
    };
    std::vector<VarInfo> vars_;
    std::vector<PendingNode> nodes_;
    std::vector<std::pair<NodeId, NodeId>> edges_;
    std::vector<PendingThread> threads_; // index = thread id - 1
};

std::vector<Diagnostic> validate(const Program& program);
std::size_t node_count(const Program& program);

std::string to_string(const Expr& e, const Program& p);
std::string to_string(const Cond& c, const Program& p);
std::string to_string(const Instruction& i, const Program& p);
// Textual CFG dump, one node per line with successors.
std::string dump(const Program& p);

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace relax
