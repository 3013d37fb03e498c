#include "relax/frontend.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace relax {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

struct Token {
    enum class Kind { Ident, Int, Punct, MembarKind, End };
    Kind kind = Kind::End;
    std::string text;
    SourcePos pos;
};

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    static const char* two_char[] = {"==", "!=", "<=", ">=", "&&", "||"};
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        const SourcePos pos{line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            out.push_back(Token{Token::Kind::Ident, std::string(src.substr(i, j - i)), pos});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            out.push_back(Token{Token::Kind::Int, std::string(src.substr(i, j - i)), pos});
            advance(j - i);
            continue;
        }
        if (c == '#') {
            std::size_t j = i + 1;
            while (j < src.size() && std::isalpha(static_cast<unsigned char>(src[j]))) ++j;
            const auto word = std::string(src.substr(i, j - i));
            if (word != "#LL" && word != "#LS" && word != "#SL" && word != "#SS") {
                throw FrontendError(pos, "unknown membar kind '" + word + "'");
            }
            out.push_back(Token{Token::Kind::MembarKind, word, pos});
            advance(j - i);
            continue;
        }
        bool matched = false;
        for (const char* op : two_char) {
            if (src.substr(i, 2) == op) {
                out.push_back(Token{Token::Kind::Punct, op, pos});
                advance(2);
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (std::string_view("{}();,=+-*<>!").find(c) != std::string_view::npos) {
            out.push_back(Token{Token::Kind::Punct, std::string(1, c), pos});
            advance(1);
            continue;
        }
        throw FrontendError(pos, std::string("unexpected character '") + c + "'");
    }
    out.push_back(Token{Token::Kind::End, "", SourcePos{line, col}});
    return out;
}

const std::set<std::string> kKeywords = {"model", "global", "thread", "local", "fence", "membar", "assert",
                                         "if",    "else",   "while",  "create", "join", "lock",  "unlock"};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
  public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    ast::SourceProgram parse_program() {
        ast::SourceProgram prog;
        if (is_word("model")) {
            next();
            prog.model = expect_ident("model name").text;
            expect(";");
        }
        while (is_word("global")) {
            next();
            do {
                const auto name = expect_ident("global name");
                declare_global(name);
                ast::GlobalDecl decl{name.text, 0, name.pos};
                if (accept("=")) decl.initial = parse_signed_int();
                prog.globals.push_back(std::move(decl));
            } while (accept(","));
            expect(";");
        }
        if (!is_word("thread")) fail({"thread"});
        while (is_word("thread")) {
            const auto pos = next().pos;
            const auto name = expect_ident("thread name");
            if (!thread_names_.insert(name.text).second) {
                throw FrontendError(name.pos, "duplicate declaration of thread '" + name.text + "'");
            }
            locals_.clear();
            ast::Thread t{name.text, {}, pos};
            expect("{");
            while (!is("}")) t.body.push_back(parse_stmt());
            expect("}");
            prog.threads.push_back(std::move(t));
        }
        locals_.clear();
        while (is_word("assert")) prog.epilogue.push_back(parse_stmt());
        if (cur().kind != Token::Kind::End) fail({"thread", "assert", "end of input"});
        return prog;
    }

  private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    bool is(std::string_view p) const { return cur().kind == Token::Kind::Punct && cur().text == p; }
    bool is_word(std::string_view w) const { return cur().kind == Token::Kind::Ident && cur().text == w; }
    bool accept(std::string_view p) {
        if (!is(p)) return false;
        next();
        return true;
    }

    [[noreturn]] void fail(const std::vector<std::string>& expected) const {
        std::string msg = "syntax error at ";
        msg += cur().kind == Token::Kind::End ? "end of input" : "'" + cur().text + "'";
        msg += ", expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) msg += i + 1 == expected.size() ? " or " : ", ";
            msg += expected[i];
        }
        throw FrontendError(cur().pos, msg);
    }

    void expect(std::string_view p) {
        if (!accept(p)) fail({"'" + std::string(p) + "'"});
    }

    Token expect_ident(const std::string& what) {
        if (cur().kind != Token::Kind::Ident || kKeywords.contains(cur().text)) fail({what});
        const auto& tok = next();
        if (tok.text.starts_with("__")) {
            throw FrontendError(tok.pos, "identifiers starting with '__' are reserved");
        }
        return tok;
    }

    std::int64_t parse_signed_int() {
        bool negative = accept("-");
        if (cur().kind != Token::Kind::Int) fail({"integer"});
        const auto tok = next();
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
        if (ec != std::errc()) throw FrontendError(tok.pos, "integer literal out of range");
        return negative ? -v : v;
    }

    void declare_global(const Token& name) {
        if (!globals_.insert(name.text).second) {
            throw FrontendError(name.pos, "duplicate declaration of '" + name.text + "'");
        }
    }

    void check_declared(const Token& name) const {
        if (!globals_.contains(name.text) && !locals_.contains(name.text)) {
            throw FrontendError(name.pos, "use of undeclared identifier '" + name.text + "'");
        }
    }

    std::vector<ast::Stmt> parse_block() {
        expect("{");
        std::vector<ast::Stmt> body;
        while (!is("}")) body.push_back(parse_stmt());
        expect("}");
        return body;
    }

    ast::Stmt parse_stmt() {
        ast::Stmt s;
        s.pos = cur().pos;
        if (cur().kind != Token::Kind::Ident) fail({"statement"});
        const std::string word = cur().text;
        if (word == "local") {
            next();
            const auto name = expect_ident("local name");
            if (globals_.contains(name.text) || locals_.contains(name.text)) {
                throw FrontendError(name.pos, "duplicate declaration of '" + name.text + "'");
            }
            s.kind = ast::Stmt::Kind::Local;
            s.name = name.text;
            if (accept("=")) s.value = parse_expr();
            locals_.insert(name.text);
            expect(";");
        } else if (word == "fence") {
            next();
            s.kind = ast::Stmt::Kind::Fence;
            expect(";");
        } else if (word == "membar") {
            next();
            s.kind = ast::Stmt::Kind::Membar;
            if (cur().kind != Token::Kind::MembarKind) fail({"membar kind"});
            while (cur().kind == Token::Kind::MembarKind) {
                const auto& k = next().text;
                if (k == "#LL") s.kinds |= membar::LL;
                if (k == "#LS") s.kinds |= membar::LS;
                if (k == "#SL") s.kinds |= membar::SL;
                if (k == "#SS") s.kinds |= membar::SS;
            }
            expect(";");
        } else if (word == "assert") {
            next();
            s.kind = ast::Stmt::Kind::Assert;
            expect("(");
            s.cond = parse_cond();
            expect(")");
            expect(";");
        } else if (word == "if") {
            next();
            s.kind = ast::Stmt::Kind::If;
            expect("(");
            s.cond = parse_cond();
            expect(")");
            s.body = parse_block();
            if (is_word("else")) {
                next();
                s.has_else = true;
                s.else_body = parse_block();
            }
        } else if (word == "while") {
            next();
            s.kind = ast::Stmt::Kind::While;
            expect("(");
            s.cond = parse_cond();
            expect(")");
            s.body = parse_block();
        } else if (word == "create" || word == "join" || word == "lock" || word == "unlock") {
            next();
            s.kind = word == "create" ? ast::Stmt::Kind::Create
                     : word == "join" ? ast::Stmt::Kind::Join
                     : word == "lock" ? ast::Stmt::Kind::Lock
                                      : ast::Stmt::Kind::Unlock;
            expect("(");
            s.name = expect_ident("identifier").text;
            expect(")");
            expect(";");
        } else {
            const auto name = expect_ident("statement");
            s.kind = ast::Stmt::Kind::Assign;
            s.name = name.text;
            expect("=");
            s.value = parse_expr();
            expect(";");
            // Report malformed syntax before scoping problems.
            check_declared(name);
        }
        return s;
    }

    // Expressions

    ast::ExprPtr make_binary(ast::Expr::Kind k, ast::ExprPtr a, ast::ExprPtr b, SourcePos pos) {
        auto e = std::make_shared<ast::Expr>();
        e->kind = k;
        e->lhs = std::move(a);
        e->rhs = std::move(b);
        e->pos = pos;
        return e;
    }

    ast::ExprPtr parse_expr() {
        auto lhs = parse_term();
        while (is("+") || is("-")) {
            const auto op = next();
            auto rhs = parse_term();
            lhs = make_binary(op.text == "+" ? ast::Expr::Kind::Add : ast::Expr::Kind::Sub, lhs, rhs, op.pos);
        }
        return lhs;
    }

    ast::ExprPtr parse_term() {
        auto lhs = parse_unary();
        while (is("*")) {
            const auto op = next();
            lhs = make_binary(ast::Expr::Kind::Mul, lhs, parse_unary(), op.pos);
        }
        return lhs;
    }

    ast::ExprPtr parse_unary() {
        if (is("-")) {
            const auto op = next();
            auto e = std::make_shared<ast::Expr>();
            e->kind = ast::Expr::Kind::Neg;
            e->lhs = parse_unary();
            e->pos = op.pos;
            return e;
        }
        return parse_primary();
    }

    ast::ExprPtr parse_primary() {
        auto e = std::make_shared<ast::Expr>();
        e->pos = cur().pos;
        if (cur().kind == Token::Kind::Int) {
            const auto tok = next();
            auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), e->value);
            if (ec != std::errc()) throw FrontendError(tok.pos, "integer literal out of range");
            e->kind = ast::Expr::Kind::Int;
            return e;
        }
        if (cur().kind == Token::Kind::Ident && !kKeywords.contains(cur().text)) {
            const auto tok = expect_ident("identifier");
            check_declared(tok);
            e->kind = ast::Expr::Kind::Ident;
            e->name = tok.text;
            return e;
        }
        if (accept("(")) {
            auto inner = parse_expr();
            expect(")");
            return inner;
        }
        fail({"expression"});
    }

    // Conditions

    static std::optional<CmpOp> cmp_of(const Token& t) {
        if (t.kind != Token::Kind::Punct) return std::nullopt;
        if (t.text == "==") return CmpOp::Eq;
        if (t.text == "!=") return CmpOp::Ne;
        if (t.text == "<") return CmpOp::Lt;
        if (t.text == "<=") return CmpOp::Le;
        if (t.text == ">") return CmpOp::Gt;
        if (t.text == ">=") return CmpOp::Ge;
        return std::nullopt;
    }

    ast::CondPtr make_cond(ast::Cond::Kind k, ast::CondPtr a, ast::CondPtr b, SourcePos pos) {
        auto c = std::make_shared<ast::Cond>();
        c->kind = k;
        c->lhs = std::move(a);
        c->rhs = std::move(b);
        c->pos = pos;
        return c;
    }

    ast::CondPtr parse_cond() {
        auto lhs = parse_and();
        while (is("||")) {
            const auto op = next();
            lhs = make_cond(ast::Cond::Kind::Or, lhs, parse_and(), op.pos);
        }
        return lhs;
    }

    ast::CondPtr parse_and() {
        auto lhs = parse_not();
        while (is("&&")) {
            const auto op = next();
            lhs = make_cond(ast::Cond::Kind::And, lhs, parse_not(), op.pos);
        }
        return lhs;
    }

    ast::CondPtr parse_not() {
        if (is("!")) {
            const auto op = next();
            return make_cond(ast::Cond::Kind::Not, parse_not(), nullptr, op.pos);
        }
        if (is("(")) {
            // Either a parenthesized condition or a comparison whose left
            // operand starts with a parenthesis; try the former first.
            const auto saved = pos_;
            try {
                next();
                auto inner = parse_cond();
                expect(")");
                if (!cmp_of(cur()) && !is("+") && !is("-") && !is("*")) return inner;
            } catch (const FrontendError&) {
            }
            pos_ = saved;
        }
        return parse_comparison();
    }

    ast::CondPtr parse_comparison() {
        auto c = std::make_shared<ast::Cond>();
        c->pos = cur().pos;
        c->kind = ast::Cond::Kind::Cmp;
        c->a = parse_expr();
        const auto op = cmp_of(cur());
        if (!op) fail({"comparison operator"});
        next();
        c->cmp = *op;
        c->b = parse_expr();
        return c;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::set<std::string> globals_;
    std::set<std::string> locals_;
    std::set<std::string> thread_names_;
};

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

void print_expr(std::ostream& out, const ast::Expr& e) {
    switch (e.kind) {
    case ast::Expr::Kind::Int: out << e.value; return;
    case ast::Expr::Kind::Ident: out << e.name; return;
    case ast::Expr::Kind::Neg:
        out << "-(";
        print_expr(out, *e.lhs);
        out << ")";
        return;
    default: break;
    }
    const char* op = e.kind == ast::Expr::Kind::Add ? " + " : e.kind == ast::Expr::Kind::Sub ? " - " : " * ";
    out << "(";
    print_expr(out, *e.lhs);
    out << op;
    print_expr(out, *e.rhs);
    out << ")";
}

void print_cond(std::ostream& out, const ast::Cond& c) {
    switch (c.kind) {
    case ast::Cond::Kind::Cmp:
        print_expr(out, *c.a);
        out << ' ' << to_string(c.cmp) << ' ';
        print_expr(out, *c.b);
        return;
    case ast::Cond::Kind::Not:
        out << "!(";
        print_cond(out, *c.lhs);
        out << ")";
        return;
    default: break;
    }
    out << "(";
    print_cond(out, *c.lhs);
    out << (c.kind == ast::Cond::Kind::And ? " && " : " || ");
    print_cond(out, *c.rhs);
    out << ")";
}

void print_stmts(std::ostream& out, const std::vector<ast::Stmt>& body, int indent);

void print_stmt(std::ostream& out, const ast::Stmt& s, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    out << pad;
    switch (s.kind) {
    case ast::Stmt::Kind::Assign:
        out << s.name << " = ";
        print_expr(out, *s.value);
        out << ";\n";
        break;
    case ast::Stmt::Kind::Local:
        out << "local " << s.name;
        if (s.value) {
            out << " = ";
            print_expr(out, *s.value);
        }
        out << ";\n";
        break;
    case ast::Stmt::Kind::Fence: out << "fence;\n"; break;
    case ast::Stmt::Kind::Membar:
        out << "membar";
        if (s.kinds & membar::LL) out << " #LL";
        if (s.kinds & membar::LS) out << " #LS";
        if (s.kinds & membar::SL) out << " #SL";
        if (s.kinds & membar::SS) out << " #SS";
        out << ";\n";
        break;
    case ast::Stmt::Kind::Assert:
        out << "assert(";
        print_cond(out, *s.cond);
        out << ");\n";
        break;
    case ast::Stmt::Kind::If:
        out << "if (";
        print_cond(out, *s.cond);
        out << ") {\n";
        print_stmts(out, s.body, indent + 1);
        out << pad << "}";
        if (s.has_else) {
            out << " else {\n";
            print_stmts(out, s.else_body, indent + 1);
            out << pad << "}";
        }
        out << "\n";
        break;
    case ast::Stmt::Kind::While:
        out << "while (";
        print_cond(out, *s.cond);
        out << ") {\n";
        print_stmts(out, s.body, indent + 1);
        out << pad << "}\n";
        break;
    case ast::Stmt::Kind::Create: out << "create(" << s.name << ");\n"; break;
    case ast::Stmt::Kind::Join: out << "join(" << s.name << ");\n"; break;
    case ast::Stmt::Kind::Lock: out << "lock(" << s.name << ");\n"; break;
    case ast::Stmt::Kind::Unlock: out << "unlock(" << s.name << ");\n"; break;
    }
}

void print_stmts(std::ostream& out, const std::vector<ast::Stmt>& body, int indent) {
    for (const auto& s : body) print_stmt(out, s, indent);
}

// ---------------------------------------------------------------------------
// Lowering
// ---------------------------------------------------------------------------

class Lowering {
  public:
    explicit Lowering(const ast::SourceProgram& src) : src_(src) {}

    Program run() {
        for (const auto& g : src_.globals) globals_[g.name] = builder_.add_global(g.name, g.initial);
        for (const auto& t : src_.threads) thread_ids_[t.name] = builder_.add_thread(t.name);
        const bool has_epilogue = !src_.epilogue.empty();
        const ThreadId epilogue = has_epilogue ? builder_.add_thread("<epilogue>", true) : 0;

        for (const auto& t : src_.threads) lower_thread(thread_ids_.at(t.name), t.body);
        if (has_epilogue) lower_thread(epilogue, src_.epilogue);
        return builder_.build();
    }

  private:
    void lower_thread(ThreadId t, const std::vector<ast::Stmt>& body) {
        thread_ = t;
        locals_.clear();
        const NodeId entry = builder_.add_node(t, Nop{});
        builder_.set_entry(t, entry);
        tail_ = entry;
        lower_block(body);
        builder_.set_exit(t, emit(Nop{}));
    }

    NodeId emit(Instruction instr) {
        const NodeId id = builder_.add_node(thread_, std::move(instr));
        builder_.add_edge(tail_, id);
        tail_ = id;
        return id;
    }

    std::optional<VarIndex> global(const std::string& name) const {
        auto it = globals_.find(name);
        if (it == globals_.end()) return std::nullopt;
        return it->second;
    }

    VarIndex local(const std::string& name, SourcePos pos) const {
        auto it = locals_.find(name);
        if (it == locals_.end()) throw FrontendError(pos, "use of undeclared identifier '" + name + "'");
        if (builder_.var(it->second).owner != thread_) {
            throw FrontendError(pos, "assignment to a local of another thread");
        }
        return it->second;
    }

    VarIndex fresh_temp() {
        const auto name = "__t" + std::to_string(temp_counter_++);
        return builder_.add_local(name, thread_);
    }

    // Rewrites an expression over locals; each global occurrence is loaded
    // into a fresh temporary, left to right.
    ExprPtr hoist(const ast::Expr& e) {
        switch (e.kind) {
        case ast::Expr::Kind::Int: return Expr::constant(e.value);
        case ast::Expr::Kind::Ident: {
            if (auto g = global(e.name)) {
                const VarIndex tmp = fresh_temp();
                emit(Load{tmp, *g});
                return Expr::variable(tmp);
            }
            return Expr::variable(local(e.name, e.pos));
        }
        case ast::Expr::Kind::Neg: return Expr::neg(hoist(*e.lhs));
        case ast::Expr::Kind::Add:
        case ast::Expr::Kind::Sub:
        case ast::Expr::Kind::Mul: {
            auto a = hoist(*e.lhs);
            auto b = hoist(*e.rhs);
            const auto op = e.kind == ast::Expr::Kind::Add   ? Expr::Op::Add
                            : e.kind == ast::Expr::Kind::Sub ? Expr::Op::Sub
                                                             : Expr::Op::Mul;
            return Expr::binary(op, std::move(a), std::move(b));
        }
        }
        return nullptr;
    }

    CondPtr hoist(const ast::Cond& c) {
        switch (c.kind) {
        case ast::Cond::Kind::Cmp: {
            auto a = hoist(*c.a);
            auto b = hoist(*c.b);
            return Cond::compare(c.cmp, std::move(a), std::move(b));
        }
        case ast::Cond::Kind::And: {
            auto a = hoist(*c.lhs);
            return Cond::conj(std::move(a), hoist(*c.rhs));
        }
        case ast::Cond::Kind::Or: {
            auto a = hoist(*c.lhs);
            return Cond::disj(std::move(a), hoist(*c.rhs));
        }
        case ast::Cond::Kind::Not: return Cond::negation(hoist(*c.lhs));
        }
        return nullptr;
    }

    void assign_local(VarIndex dst, const ast::Expr& value) {
        if (value.kind == ast::Expr::Kind::Ident) {
            if (auto g = global(value.name)) {
                emit(Load{dst, *g});
                return;
            }
        }
        auto e = hoist(value);
        emit(LocalAssign{dst, std::move(e)});
    }

    ThreadId thread_ref(const ast::Stmt& s) const {
        auto it = thread_ids_.find(s.name);
        if (it == thread_ids_.end()) throw FrontendError(s.pos, "unknown thread '" + s.name + "'");
        return it->second;
    }

    void lower_block(const std::vector<ast::Stmt>& body) {
        for (const auto& s : body) lower_stmt(s);
    }

    void lower_stmt(const ast::Stmt& s) {
        switch (s.kind) {
        case ast::Stmt::Kind::Assign:
            if (auto g = global(s.name)) {
                auto e = hoist(*s.value);
                emit(Store{*g, std::move(e)});
            } else {
                assign_local(local(s.name, s.pos), *s.value);
            }
            break;
        case ast::Stmt::Kind::Local: {
            const VarIndex v = builder_.add_local(s.name, thread_);
            locals_[s.name] = v;
            if (s.value) assign_local(v, *s.value);
            break;
        }
        case ast::Stmt::Kind::Fence:
        case ast::Stmt::Kind::Lock:
        case ast::Stmt::Kind::Unlock: emit(Fence{}); break;
        case ast::Stmt::Kind::Membar: emit(Membar{s.kinds}); break;
        case ast::Stmt::Kind::Assert: {
            auto c = hoist(*s.cond);
            emit(Assert{std::move(c), "line " + std::to_string(s.pos.line), s.pos.line});
            break;
        }
        case ast::Stmt::Kind::If: {
            auto c = hoist(*s.cond);
            const NodeId branch = tail_;
            emit(Assume{c});
            lower_block(s.body);
            const NodeId then_tail = tail_;
            tail_ = branch;
            emit(Assume{Cond::negation(c)});
            lower_block(s.else_body);
            const NodeId else_tail = tail_;
            const NodeId merge = builder_.add_node(thread_, Nop{});
            builder_.add_edge(then_tail, merge);
            builder_.add_edge(else_tail, merge);
            tail_ = merge;
            break;
        }
        case ast::Stmt::Kind::While: {
            const NodeId before = tail_;
            const auto first_new = static_cast<NodeId>(before + 1);
            auto c = hoist(*s.cond);
            // The loop head is the first hoisted load, or a Nop when the
            // condition reads no globals.
            NodeId head;
            if (tail_ == before) {
                head = emit(Nop{});
            } else {
                head = first_new;
            }
            const NodeId branch = tail_;
            emit(Assume{c});
            lower_block(s.body);
            builder_.add_edge(tail_, head);
            tail_ = branch;
            emit(Assume{Cond::negation(c)});
            break;
        }
        case ast::Stmt::Kind::Create: emit(ThreadCreate{thread_ref(s)}); break;
        case ast::Stmt::Kind::Join: emit(ThreadJoin{thread_ref(s)}); break;
        }
    }

    const ast::SourceProgram& src_;
    ProgramBuilder builder_;
    std::map<std::string, VarIndex> globals_;
    std::map<std::string, ThreadId> thread_ids_;
    std::map<std::string, VarIndex> locals_;
    ThreadId thread_ = 0;
    NodeId tail_ = 0;
    int temp_counter_ = 0;
};

} // namespace

namespace ast {

static bool same_ptr(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return same(*a, *b);
}

static bool same_ptr(const CondPtr& a, const CondPtr& b) {
    if (!a || !b) return !a && !b;
    return same(*a, *b);
}

static bool same_body(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!same(a[i], b[i])) return false;
    }
    return true;
}

bool same(const Expr& a, const Expr& b) {
    return a.kind == b.kind && a.value == b.value && a.name == b.name && same_ptr(a.lhs, b.lhs) &&
           same_ptr(a.rhs, b.rhs);
}

bool same(const Cond& a, const Cond& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Cond::Kind::Cmp) return a.cmp == b.cmp && same_ptr(a.a, b.a) && same_ptr(a.b, b.b);
    return same_ptr(a.lhs, b.lhs) && same_ptr(a.rhs, b.rhs);
}

bool same(const Stmt& a, const Stmt& b) {
    return a.kind == b.kind && a.name == b.name && same_ptr(a.value, b.value) && same_ptr(a.cond, b.cond) &&
           a.kinds == b.kinds && a.has_else == b.has_else && same_body(a.body, b.body) &&
           same_body(a.else_body, b.else_body);
}

bool same(const SourceProgram& a, const SourceProgram& b) {
    if (a.model != b.model || a.globals.size() != b.globals.size() || a.threads.size() != b.threads.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.globals.size(); ++i) {
        if (a.globals[i].name != b.globals[i].name || a.globals[i].initial != b.globals[i].initial) return false;
    }
    for (std::size_t i = 0; i < a.threads.size(); ++i) {
        if (a.threads[i].name != b.threads[i].name || !same_body(a.threads[i].body, b.threads[i].body)) {
            return false;
        }
    }
    return same_body(a.epilogue, b.epilogue);
}

} // namespace ast

ast::SourceProgram parse(std::string_view text) {
    Parser parser(tokenize(text));
    return parser.parse_program();
}

std::string print(const ast::SourceProgram& program) {
    std::ostringstream out;
    if (program.model) out << "model " << *program.model << ";\n";
    for (const auto& g : program.globals) out << "global " << g.name << " = " << g.initial << ";\n";
    for (const auto& t : program.threads) {
        out << "thread " << t.name << " {\n";
        print_stmts(out, t.body, 1);
        out << "}\n";
    }
    print_stmts(out, program.epilogue, 0);
    return out.str();
}

Program lower(const ast::SourceProgram& program) { return Lowering(program).run(); }

Program compile(std::string_view text) { return lower(parse(text)); }

} // namespace relax
