#include "relax/datalog.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace relax::datalog {

Tuple Relation::project(const Tuple& t, unsigned mask) {
    Tuple k{};
    for (std::size_t i = 0; i < kMaxArity; ++i) {
        if (mask & (1u << i)) k[i] = t[i];
    }
    return k;
}

bool Relation::insert(const Tuple& t) {
    if (!set_.insert(t).second) return false;
    const auto id = static_cast<std::uint32_t>(rows_.size());
    rows_.push_back(t);
    for (auto& [mask, index] : indexes_) index[project(t, mask)].push_back(id);
    return true;
}

void Relation::truncate(std::size_t size) {
    while (rows_.size() > size) {
        const Tuple t = rows_.back();
        rows_.pop_back();
        set_.erase(t);
        for (auto& [mask, index] : indexes_) {
            auto it = index.find(project(t, mask));
            it->second.pop_back();
            if (it->second.empty()) index.erase(it);
        }
    }
}

const std::vector<std::uint32_t>& Relation::lookup(unsigned mask, const Tuple& key) {
    static const std::vector<std::uint32_t> empty;
    auto [it, created] = indexes_.try_emplace(mask);
    auto& index = it->second;
    if (created) {
        for (std::uint32_t i = 0; i < rows_.size(); ++i) index[project(rows_[i], mask)].push_back(i);
    }
    auto found = index.find(project(key, mask));
    return found == index.end() ? empty : found->second;
}

RelId Database::declare(const std::string& name, std::size_t arity) {
    if (arity == 0 || arity > kMaxArity) throw std::invalid_argument("relation arity out of range: " + name);
    if (auto it = by_name_.find(name); it != by_name_.end()) {
        if (rels_[it->second].arity() != arity) throw std::invalid_argument("arity mismatch for " + name);
        return it->second;
    }
    const auto id = static_cast<RelId>(rels_.size());
    rels_.emplace_back(name, arity);
    by_name_.emplace(name, id);
    return id;
}

RelId Database::id(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw std::out_of_range("unknown relation " + name);
    return it->second;
}

Database::Mark Database::mark() const {
    Mark m;
    m.reserve(rels_.size());
    for (const auto& r : rels_) m.push_back(r.size());
    return m;
}

void Database::truncate(const Mark& m) {
    for (std::size_t i = 0; i < rels_.size(); ++i) rels_[i].truncate(i < m.size() ? m[i] : 0);
}

namespace {

class RuleLexer {
  public:
    explicit RuleLexer(std::string_view s) : s_(s) {}

    std::string next() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ >= s_.size()) return "";
        if (s_.substr(pos_, 2) == ":-") {
            pos_ += 2;
            return ":-";
        }
        const char c = s_[pos_];
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            const auto start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            return std::string(s_.substr(start, pos_ - start));
        }
        ++pos_;
        return std::string(1, c);
    }

    std::string peek() {
        const auto saved = pos_;
        auto t = next();
        pos_ = saved;
        return t;
    }

  private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace

Rule Database::parse_rule(std::string_view text) const {
    RuleLexer lex(text);
    Rule rule;
    rule.text = std::string(text);
    std::map<std::string, Value> vars;
    const auto fail = [&](const std::string& why) {
        throw std::invalid_argument("bad rule '" + std::string(text) + "': " + why);
    };
    const auto expect = [&](const std::string& tok) {
        if (lex.next() != tok) fail("expected '" + tok + "'");
    };
    const auto atom = [&]() {
        Atom a;
        const auto name = lex.next();
        auto it = by_name_.find(name);
        if (it == by_name_.end()) fail("unknown relation '" + name + "'");
        a.rel = it->second;
        expect("(");
        while (true) {
            const auto tok = lex.next();
            if (tok.empty()) fail("unterminated atom");
            Term t;
            if (std::isdigit(static_cast<unsigned char>(tok[0]))) {
                t.is_var = false;
                t.value = static_cast<Value>(std::stoul(tok));
            } else if (tok == "_") {
                t.value = static_cast<Value>(rule.var_count++);
            } else {
                auto [vit, fresh] = vars.try_emplace(tok, static_cast<Value>(rule.var_count));
                if (fresh) ++rule.var_count;
                t.value = vit->second;
            }
            a.terms.push_back(t);
            const auto sep = lex.next();
            if (sep == ")") break;
            if (sep != ",") fail("expected ',' or ')'");
        }
        if (a.terms.size() != rels_[a.rel].arity()) fail("arity mismatch for " + name);
        return a;
    };

    rule.head = atom();
    expect(":-");
    const std::size_t head_vars = rule.var_count;
    do {
        rule.body.push_back(atom());
    } while (lex.peek() == "," && !lex.next().empty());
    expect(".");
    if (!lex.next().empty()) fail("trailing input");

    std::vector<bool> in_body(rule.var_count, false);
    for (const auto& a : rule.body) {
        for (const auto& t : a.terms) {
            if (t.is_var) in_body[t.value] = true;
        }
    }
    for (const auto& t : rule.head.terms) {
        if (t.is_var && (t.value >= head_vars || !in_body[t.value])) fail("head variable not bound by body");
    }
    return rule;
}

namespace {

struct Range {
    std::size_t lo;
    std::size_t hi;
};

class Joiner {
  public:
    Joiner(std::vector<Relation>& rels, const Rule& rule, std::vector<Range> ranges, std::vector<Tuple>& out)
        : rels_(rels), rule_(rule), ranges_(std::move(ranges)), out_(out), binding_(rule.var_count),
          bound_(rule.var_count, false) {}

    void run() { step(0); }

  private:
    void step(std::size_t k) {
        if (k == rule_.body.size()) {
            Tuple t{};
            for (std::size_t i = 0; i < rule_.head.terms.size(); ++i) {
                const auto& term = rule_.head.terms[i];
                t[i] = term.is_var ? binding_[term.value] : term.value;
            }
            out_.push_back(t);
            return;
        }
        const Atom& atom = rule_.body[k];
        Relation& rel = rels_[atom.rel];
        const Range range = ranges_[k];
        if (range.lo >= range.hi) return;

        unsigned mask = 0;
        Tuple key{};
        for (std::size_t i = 0; i < atom.terms.size(); ++i) {
            const auto& term = atom.terms[i];
            if (!term.is_var) {
                mask |= 1u << i;
                key[i] = term.value;
            } else if (bound_[term.value]) {
                mask |= 1u << i;
                key[i] = binding_[term.value];
            }
        }

        if (mask == 0) {
            for (std::size_t r = range.lo; r < range.hi; ++r) try_row(k, atom, rel.row(r));
            return;
        }
        const auto& ids = rel.lookup(mask, key);
        for (auto it = std::lower_bound(ids.begin(), ids.end(), range.lo); it != ids.end() && *it < range.hi; ++it) {
            try_row(k, atom, rel.row(*it));
        }
    }

    void try_row(std::size_t k, const Atom& atom, const Tuple& row) {
        std::array<Value, kMaxArity> newly{};
        std::size_t n_new = 0;
        bool ok = true;
        for (std::size_t i = 0; i < atom.terms.size() && ok; ++i) {
            const auto& term = atom.terms[i];
            if (!term.is_var) {
                ok = row[i] == term.value;
            } else if (bound_[term.value]) {
                ok = row[i] == binding_[term.value];
            } else {
                bound_[term.value] = true;
                binding_[term.value] = row[i];
                newly[n_new++] = term.value;
            }
        }
        if (ok) step(k + 1);
        for (std::size_t i = 0; i < n_new; ++i) bound_[newly[i]] = false;
    }

    std::vector<Relation>& rels_;
    const Rule& rule_;
    std::vector<Range> ranges_;
    std::vector<Tuple>& out_;
    std::vector<Value> binding_;
    std::vector<bool> bound_;
};

} // namespace

void Database::evaluate(const std::vector<Rule>& rules, const Mark& from) {
    const std::size_t n = rels_.size();
    std::vector<std::size_t> old_end(n);
    std::vector<std::size_t> delta_end(n);
    for (std::size_t r = 0; r < n; ++r) {
        old_end[r] = std::min(r < from.size() ? from[r] : 0, rels_[r].size());
        delta_end[r] = rels_[r].size();
    }

    std::vector<Tuple> produced;
    std::vector<RelId> heads;
    while (true) {
        bool any_delta = false;
        for (std::size_t r = 0; r < n; ++r) any_delta |= old_end[r] < delta_end[r];
        if (!any_delta) break;

        for (const Rule& rule : rules) {
            for (std::size_t i = 0; i < rule.body.size(); ++i) {
                const RelId ri = rule.body[i].rel;
                if (old_end[ri] == delta_end[ri]) continue;
                std::vector<Range> ranges;
                ranges.reserve(rule.body.size());
                for (std::size_t j = 0; j < rule.body.size(); ++j) {
                    const RelId rj = rule.body[j].rel;
                    if (j < i) {
                        ranges.push_back({0, old_end[rj]});
                    } else if (j == i) {
                        ranges.push_back({old_end[rj], delta_end[rj]});
                    } else {
                        ranges.push_back({0, delta_end[rj]});
                    }
                }
                Joiner(rels_, rule, std::move(ranges), produced).run();
                heads.resize(produced.size(), rule.head.rel);
            }
        }

        for (std::size_t p = 0; p < produced.size(); ++p) rels_[heads[p]].insert(produced[p]);
        produced.clear();
        heads.clear();
        for (std::size_t r = 0; r < n; ++r) {
            old_end[r] = delta_end[r];
            delta_end[r] = rels_[r].size();
        }
    }
}

} // namespace relax::datalog
