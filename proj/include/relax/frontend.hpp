#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "relax/ir.hpp"

namespace relax {

struct SourcePos {
    int line = 0;
    int column = 0;
};

class FrontendError : public std::runtime_error {
  public:
    FrontendError(SourcePos pos, const std::string& message)
        : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message),
          pos_(pos), message_(message) {}
    SourcePos pos() const { return pos_; }
    const std::string& message() const { return message_; }

  private:
    SourcePos pos_;
    std::string message_;
};

namespace ast {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;
struct Expr {
    enum class Kind { Int, Ident, Neg, Add, Sub, Mul };
    Kind kind = Kind::Int;
    std::int64_t value = 0;
    std::string name;
    ExprPtr lhs;
    ExprPtr rhs;
    SourcePos pos;
};

struct Cond;
using CondPtr = std::shared_ptr<const Cond>;
struct Cond {
    enum class Kind { Cmp, And, Or, Not };
    Kind kind = Kind::Cmp;
    CmpOp cmp = CmpOp::Eq;
    ExprPtr a;
    ExprPtr b;
    CondPtr lhs;
    CondPtr rhs;
    SourcePos pos;
};

struct Stmt {
    enum class Kind { Assign, Local, Fence, Membar, Assert, If, While, Create, Join, Lock, Unlock };
    Kind kind = Kind::Fence;
    std::string name;  // assignment target, local name, thread or lock name
    ExprPtr value;     // Assign, Local (optional)
    CondPtr cond;      // Assert, If, While
    std::uint8_t kinds = 0; // Membar
    std::vector<Stmt> body;
    std::vector<Stmt> else_body;
    bool has_else = false;
    SourcePos pos;
};

struct GlobalDecl {
    std::string name;
    std::int64_t initial = 0;
    SourcePos pos;
};

struct Thread {
    std::string name;
    std::vector<Stmt> body;
    SourcePos pos;
};

// A parsed .lit file. Trailing top-level asserts form the epilogue.
struct SourceProgram {
    std::optional<std::string> model;
    std::vector<GlobalDecl> globals;
    std::vector<Thread> threads;
    std::vector<Stmt> epilogue;
};

// Structural equality, ignoring source positions.
bool same(const Expr& a, const Expr& b);
bool same(const Cond& a, const Cond& b);
bool same(const Stmt& a, const Stmt& b);
bool same(const SourceProgram& a, const SourceProgram& b);

} // namespace ast

ast::SourceProgram parse(std::string_view text);
std::string print(const ast::SourceProgram& program);
Program lower(const ast::SourceProgram& program);

// parse + lower.
Program compile(std::string_view text);

} // namespace relax
