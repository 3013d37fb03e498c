#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace relax::datalog {

using Value = std::uint32_t;
inline constexpr std::size_t kMaxArity = 3;
using Tuple = std::array<Value, kMaxArity>;

struct TupleHash {
    std::size_t operator()(const Tuple& t) const {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (Value v : t) h = (h ^ v) * 0x100000001b3ULL;
        return h;
    }
};

using RelId = std::uint32_t;

// Append-only relation. Row ids are stable until truncate(); indexes on sets
// of bound columns are built on first use and kept up to date afterwards.
class Relation {
  public:
    Relation(std::string name, std::size_t arity) : name_(std::move(name)), arity_(arity) {}

    const std::string& name() const { return name_; }
    std::size_t arity() const { return arity_; }
    std::size_t size() const { return rows_.size(); }
    const Tuple& row(std::size_t i) const { return rows_[i]; }
    const std::vector<Tuple>& rows() const { return rows_; }

    bool contains(const Tuple& t) const { return set_.contains(t); }
    bool insert(const Tuple& t);
    void truncate(std::size_t size);

    // Row ids (ascending) whose columns in mask equal those of key.
    const std::vector<std::uint32_t>& lookup(unsigned mask, const Tuple& key);

  private:
    static Tuple project(const Tuple& t, unsigned mask);

    std::string name_;
    std::size_t arity_;
    std::vector<Tuple> rows_;
    std::unordered_set<Tuple, TupleHash> set_;
    std::map<unsigned, std::unordered_map<Tuple, std::vector<std::uint32_t>, TupleHash>> indexes_;
};

struct Term {
    bool is_var = true;
    Value value = 0; // variable slot or constant
};

struct Atom {
    RelId rel = 0;
    std::vector<Term> terms;
};

struct Rule {
    Atom head;
    std::vector<Atom> body;
    std::size_t var_count = 0;
    std::string text;
};

class Database {
  public:
    RelId declare(const std::string& name, std::size_t arity);
    RelId id(const std::string& name) const;
    bool has(const std::string& name) const { return by_name_.contains(name); }
    Relation& rel(RelId r) { return rels_.at(r); }
    const Relation& rel(RelId r) const { return rels_.at(r); }
    Relation& rel(const std::string& name) { return rels_.at(id(name)); }
    const Relation& rel(const std::string& name) const { return rels_.at(id(name)); }
    std::size_t relation_count() const { return rels_.size(); }

    bool insert(RelId r, Value a, Value b = 0, Value c = 0) { return rels_.at(r).insert(Tuple{a, b, c}); }

    // Sizes of all relations; rows before a mark are treated as closed under
    // the rules by evaluate().
    using Mark = std::vector<std::size_t>;
    Mark mark() const;
    void truncate(const Mark& m);

    // Parses "Head(x,y) :- A(x,z), B(z,y)." over declared relations. Integer
    // literals are constants and "_" is an anonymous variable.
    Rule parse_rule(std::string_view text) const;

    // Semi-naive evaluation to the least fixpoint, treating rows added since
    // `from` as the initial delta.
    void evaluate(const std::vector<Rule>& rules, const Mark& from);
    void evaluate(const std::vector<Rule>& rules) { evaluate(rules, Mark(rels_.size(), 0)); }

  private:
    std::vector<Relation> rels_;
    std::map<std::string, RelId, std::less<>> by_name_;
};

} // namespace relax::datalog
