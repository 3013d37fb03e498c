#include "suites.hpp"

#include <algorithm>
#include <sstream>

#include "relax/datalog.hpp"
#include "relax/domain.hpp"
#include "relax/feasibility.hpp"
#include "relax/oracle.hpp"
#include "relax/relations.hpp"
#include "relax/report.hpp"
#include "testkit.hpp"

namespace relax::testkit {

void SuiteResult::fail(std::string message) {
    if (failures.size() < 5) failures.push_back(std::move(message));
}

namespace {

constexpr VarIndex kVars = 4;

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Interval random_interval(Rng& rng) {
    const int k = uniform(rng, 0, 19);
    if (k == 0) return Interval::bottom();
    if (k == 1) return Interval::top();
    std::int64_t a = uniform(rng, -20, 20);
    std::int64_t b = uniform(rng, -20, 20);
    if (a > b) std::swap(a, b);
    const Bound lo = k % 5 == 2 ? Bound::minus_inf() : Bound::finite(a);
    const Bound hi = k % 5 == 3 ? Bound::plus_inf() : Bound::finite(b);
    return Interval(lo, hi);
}

Env random_env(Rng& rng) {
    if (uniform(rng, 0, 19) == 0) return Env::bottom();
    Env env = Env::top();
    for (VarIndex v = 0; v < kVars; ++v) {
        if (uniform(rng, 0, 3) == 0) continue;
        Interval i = random_interval(rng);
        if (i.is_bottom()) i = Interval::constant(0);
        env.set(v, i);
    }
    return env;
}

ExprPtr random_expr(Rng& rng, int depth) {
    const int k = uniform(rng, 0, depth > 0 ? 5 : 1);
    switch (k) {
    case 0: return Expr::constant(uniform(rng, -5, 5));
    case 1: return Expr::variable(static_cast<VarIndex>(uniform(rng, 0, kVars - 1)));
    case 2: return Expr::neg(random_expr(rng, depth - 1));
    case 3: return Expr::binary(Expr::Op::Add, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 4: return Expr::binary(Expr::Op::Sub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    default: return Expr::binary(Expr::Op::Mul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    }
}

CondPtr random_cond(Rng& rng, int depth) {
    const int k = uniform(rng, 0, depth > 0 ? 3 : 0);
    switch (k) {
    case 0: {
        static const CmpOp ops[] = {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
        return Cond::compare(ops[uniform(rng, 0, 5)], random_expr(rng, 1), random_expr(rng, 1));
    }
    case 1: return Cond::conj(random_cond(rng, depth - 1), random_cond(rng, depth - 1));
    case 2: return Cond::disj(random_cond(rng, depth - 1), random_cond(rng, depth - 1));
    default: return Cond::negation(random_cond(rng, depth - 1));
    }
}

Instruction random_instruction(Rng& rng) {
    const auto v = [&rng] { return static_cast<VarIndex>(uniform(rng, 0, kVars - 1)); };
    switch (uniform(rng, 0, 4)) {
    case 0: return Load{v(), v()};
    case 1: return Store{v(), random_expr(rng, 2)};
    case 2: return LocalAssign{v(), random_expr(rng, 2)};
    case 3: return Fence{};
    default: return Assume{random_cond(rng, 2)};
    }
}

template <class Set>
bool subset(const Set& a, const Set& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Random reads-from facts: some loads paired with a store to the same global.
std::vector<NodePair> random_facts(const Program& p, Rng& rng) {
    std::vector<NodePair> facts;
    for (const auto& node : p.nodes()) {
        const auto v = p.loaded_var(node.id);
        if (!v || uniform(rng, 0, 1) == 0) continue;
        std::vector<NodeId> stores;
        for (const auto& s : p.nodes()) {
            if (p.stored_var(s.id) == v) stores.push_back(s.id);
        }
        facts.emplace_back(node.id, stores[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(stores.size()) - 1))]);
    }
    return facts;
}

// Random litmus programs small enough for exhaustive exploration.
Program random_small_program(Rng& rng, const RandomProgramOptions& options, std::size_t max_events,
                             std::string* text = nullptr) {
    for (;;) {
        std::string src = random_program(rng, options);
        Program p = compile(src);
        if (memory_events_upper_bound(p) > max_events) continue;
        if (!options.loops && has_loops(p)) continue;
        if (text) *text = std::move(src);
        return p;
    }
}

// Litmus tests aimed at relaxed behaviors are costly to find, so every suite
// draws from one pool.
const std::vector<std::string>& litmus_pool() {
    static const std::vector<std::string> pool = [] {
        std::vector<std::string> out;
        Rng rng(0x5eed);
        while (out.size() < 150) {
            if (auto src = random_litmus_program(rng)) out.push_back(std::move(*src));
        }
        return out;
    }();
    return pool;
}

// Half plain random programs, half litmus tests from the pool.
Program random_mixed_program(Rng& rng, const RandomProgramOptions& options, std::size_t max_events,
                             std::string* text = nullptr) {
    if (uniform(rng, 0, 1)) return random_small_program(rng, options, max_events, text);
    for (;;) {
        const auto& pool = litmus_pool();
        const std::string& src = pool[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pool.size()) - 1))];
        Program p = compile(src);
        if (memory_events_upper_bound(p) > max_events) continue;
        if (text) *text = src;
        return p;
    }
}

std::vector<Program> corpus_programs() {
    std::vector<Program> out;
    for (const auto& name : corpus_names()) out.push_back(load_corpus(name));
    return out;
}

std::string env_str(const Env& e) {
    if (e.is_bottom()) return "_|_";
    std::ostringstream out;
    for (const auto& [v, i] : e.bindings()) out << v << ":" << i.str() << " ";
    return out.str();
}

} // namespace

SuiteResult lattice_laws(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"lattice laws", 0, {}};
    Rng rng(seed);
    for (; r.cases < cases; ++r.cases) {
        const Interval a = random_interval(rng), b = random_interval(rng), c = random_interval(rng);
        const std::string where = a.str() + " " + b.str() + " " + c.str();
        if (!(a.join(b) == b.join(a))) r.fail("join not commutative: " + where);
        if (!(a.join(b).join(c) == a.join(b.join(c)))) r.fail("join not associative: " + where);
        if (!(a.join(a) == a)) r.fail("join not idempotent: " + where);
        if (!a.leq(a.join(b)) || !b.leq(a.join(b))) r.fail("join not an upper bound: " + where);
        if (a.leq(c) && b.leq(c) && !a.join(b).leq(c)) r.fail("join not least: " + where);
        if (!a.leq(a)) r.fail("leq not reflexive: " + where);
        if (a.leq(b) && b.leq(a) && !(a == b)) r.fail("leq not antisymmetric: " + where);
        if (a.leq(b) && b.leq(c) && !a.leq(c)) r.fail("leq not transitive: " + where);
        if (!a.meet(b).leq(a) || !a.meet(b).leq(b)) r.fail("meet not a lower bound: " + where);
        if (!(a.join(a.meet(b)) == a)) r.fail("absorption fails: " + where);
        if (!Interval::bottom().leq(a) || !a.leq(Interval::top())) r.fail("bottom/top misplaced: " + where);

        const Env e = random_env(rng), f = random_env(rng), g = random_env(rng);
        if (!(e.join(f) == f.join(e))) r.fail("env join not commutative");
        if (!(e.join(f).join(g) == e.join(f.join(g)))) r.fail("env join not associative");
        if (!(e.join(e) == e)) r.fail("env join not idempotent");
        if (!e.leq(e.join(f)) || !f.leq(e.join(f))) r.fail("env join not an upper bound");
        if (e.leq(f) && f.leq(e) && !(e == f)) r.fail("env leq not antisymmetric");
        if (!Env::bottom().leq(e)) r.fail("env bottom not least");
    }
    return r;
}

SuiteResult widening_ascent(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"widening ascent", 0, {}};
    Rng rng(seed);
    for (; r.cases < cases; ++r.cases) {
        const Interval a = random_interval(rng), b = random_interval(rng);
        if (!a.join(b).leq(a.widen(b))) r.fail("widen below join: " + a.str() + " " + b.str());
        Interval x = random_interval(rng);
        int increases = 0;
        for (int step = 0; step < 12; ++step) {
            const Interval next = x.widen(x.join(random_interval(rng)));
            if (!(next == x)) ++increases;
            x = next;
        }
        // Each bound can jump to infinity once, plus the step out of bottom.
        if (increases > 3) r.fail("widening chain grew " + std::to_string(increases) + " times");

        const Env e = random_env(rng), f = random_env(rng);
        if (!e.join(f).leq(e.widen(f))) r.fail("env widen below join");
        if (!(e.widen(e) == e)) r.fail("env widen not stable on equal input");
    }
    return r;
}

SuiteResult transfer_monotonicity(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"transfer monotonicity", 0, {}};
    Rng rng(seed);
    for (; r.cases < cases; ++r.cases) {
        const Env small = random_env(rng);
        const Env large = small.join(random_env(rng));
        const Instruction i = random_instruction(rng);
        const Env a = transfer(i, small), b = transfer(i, large);
        if (!a.leq(b)) r.fail("transfer not monotone: " + env_str(small) + " / " + env_str(large));
        if (const auto* as = std::get_if<Assume>(&i)) {
            if (may_be_true(*as->cond, small) && !may_be_true(*as->cond, large)) r.fail("may_be_true not monotone");
            if (may_be_false(*as->cond, small) && !may_be_false(*as->cond, large)) r.fail("may_be_false not monotone");
        }
    }
    return r;
}

SuiteResult transfer_concrete_soundness(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"transfer soundness on singletons", 0, {}};
    Rng rng(seed);
    for (; r.cases < cases; ++r.cases) {
        std::vector<std::int64_t> values(kVars);
        Env env = Env::top();
        for (VarIndex v = 0; v < kVars; ++v) {
            values[v] = uniform(rng, -10, 10);
            env.set(v, Interval::constant(values[v]));
        }
        const auto lookup = [&values](VarIndex v) -> std::optional<std::int64_t> { return values[v]; };
        const Instruction i = random_instruction(rng);
        const Env out = transfer(i, env);
        std::vector<std::int64_t> after = values;
        bool feasible = true;
        std::visit(overloaded{
                       [&](const Load& l) { after[l.dst] = values[l.src]; },
                       [&](const Store& s) { after[s.dst] = *evaluate(*s.value, lookup); },
                       [&](const LocalAssign& a) { after[a.dst] = *evaluate(*a.value, lookup); },
                       [&](const Assume& a) { feasible = *evaluate(*a.cond, lookup); },
                       [](const auto&) {},
                   },
                   i);
        if (!feasible) continue;
        for (VarIndex v = 0; v < kVars; ++v) {
            if (!out.get(v).contains(after[v])) {
                r.fail("concrete value " + std::to_string(after[v]) + " missing from " + out.get(v).str());
            }
        }
        if (const auto* a = std::get_if<Assume>(&i)) {
            if (!may_be_true(*a->cond, env)) r.fail("may_be_true false on a satisfied condition");
        }
    }
    return r;
}

SuiteResult model_inclusion_chains(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"NoReorder/MHB/MustNotReadFrom model inclusion", 0, {}};
    Rng rng(seed);
    std::vector<Program> programs = corpus_programs();
    RandomProgramOptions options;
    while (programs.size() < cases) programs.push_back(random_mixed_program(rng, options, 12));
    for (const Program& p : programs) {
        ++r.cases;
        const auto facts = random_facts(p, rng);
        std::vector<PairSet> nr, mhb, mnrf;
        for (MemoryModel m : kAllModels) {
            FeasibilityChecker checker(p, m);
            nr.push_back(checker.no_reorder());
            mhb.push_back(checker.mhb(facts));
            mnrf.push_back(checker.must_not_read_from(facts));
        }
        for (std::size_t i = 1; i < nr.size(); ++i) {
            const std::string pair = std::string(to_string(kAllModels[i])) + " vs " + to_string(kAllModels[i - 1]);
            if (!subset(nr[i], nr[i - 1])) r.fail("NoReorder " + pair);
            if (!subset(mhb[i], mhb[i - 1])) r.fail("MHB " + pair);
            if (!subset(mnrf[i], mnrf[i - 1])) r.fail("MustNotReadFrom " + pair);
        }
    }
    return r;
}

SuiteResult fact_monotonicity(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"fact monotonicity", 0, {}};
    Rng rng(seed);
    RandomProgramOptions options;
    for (; r.cases < cases; ++r.cases) {
        const Program p = random_mixed_program(rng, options, 12);
        const MemoryModel m = kAllModels[uniform(rng, 0, 3)];
        const auto more = random_facts(p, rng);
        std::vector<NodePair> fewer;
        for (const auto& f : more) {
            if (uniform(rng, 0, 1)) fewer.push_back(f);
        }
        FeasibilityChecker checker(p, m);
        const auto mhb_few = checker.mhb(fewer), mhb_more = checker.mhb(more);
        const auto nrf_few = checker.must_not_read_from(fewer), nrf_more = checker.must_not_read_from(more);
        if (!subset(mhb_few, mhb_more)) r.fail("MHB shrank when facts were added");
        if (!subset(nrf_few, nrf_more)) r.fail("MustNotReadFrom shrank when facts were added");
        // Queries must not leak facts into each other.
        if (checker.mhb(fewer) != mhb_few) r.fail("repeated query differs");
    }
    return r;
}

SuiteResult datalog_closure(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"Datalog closure and incremental monotonicity", 0, {}};
    Rng rng(seed);
    for (; r.cases < cases; ++r.cases) {
        const int n = uniform(rng, 1, 8);
        datalog::Database db;
        const auto e = db.declare("E", 2);
        const auto t = db.declare("T", 2);
        db.declare("Tri", 3);
        const std::vector<datalog::Rule> rules = {
            db.parse_rule("T(a,b) :- E(a,b)."),
            db.parse_rule("T(a,c) :- T(a,b), E(b,c)."),
            db.parse_rule("Tri(a,b,c) :- E(a,b), E(b,c), E(c,a)."),
        };
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        auto add_edges = [&](int count) {
            for (int k = 0; k < count; ++k) {
                const int a = uniform(rng, 0, n - 1), b = uniform(rng, 0, n - 1);
                adj[a][b] = true;
                db.insert(e, static_cast<datalog::Value>(a), static_cast<datalog::Value>(b));
            }
        };
        add_edges(uniform(rng, 0, 2 * n));
        db.evaluate(rules);
        const auto before = db.rel(t).rows();
        const auto mark = db.mark();
        add_edges(uniform(rng, 0, n));
        db.evaluate(rules, mark);

        auto reach = adj;
        for (int k = 0; k < n; ++k) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (reach[i][k] && reach[k][j]) reach[i][j] = true;
                }
            }
        }
        std::size_t expected = 0, triangles = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (!reach[i][j]) continue;
                ++expected;
                if (!db.rel(t).contains({static_cast<datalog::Value>(i), static_cast<datalog::Value>(j), 0})) {
                    r.fail("missing T(" + std::to_string(i) + "," + std::to_string(j) + ")");
                }
                for (int k = 0; k < n; ++k) {
                    if (adj[i][j] && adj[j][k] && adj[k][i]) ++triangles;
                }
            }
        }
        if (db.rel(t).size() != expected) r.fail("T has extra tuples");
        if (db.rel("Tri").size() != triangles) r.fail("Tri size " + std::to_string(db.rel("Tri").size()));
        for (const auto& row : before) {
            if (!db.rel(t).contains(row)) r.fail("tuple lost after adding facts");
        }
    }
    return r;
}

SuiteResult dominator_equivalence(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"dominators and reachability vs brute force", 0, {}};
    Rng rng(seed);
    for (; r.cases < cases; ++r.cases) {
        const int n = uniform(rng, 2, 12);
        std::vector<std::pair<int, int>> edges;
        for (int i = 1; i < n; ++i) edges.emplace_back(uniform(rng, 0, i - 1), i);
        const int extra = uniform(rng, 0, n);
        for (int k = 0; k < extra; ++k) {
            const int a = uniform(rng, 0, n - 2), b = uniform(rng, 1, n - 1);
            if (std::find(edges.begin(), edges.end(), std::pair{a, b}) == edges.end()) edges.emplace_back(a, b);
        }
        ProgramBuilder builder;
        const ThreadId th = builder.add_thread("g");
        std::vector<NodeId> handles;
        for (int i = 0; i < n; ++i) handles.push_back(builder.add_node(th, Nop{}));
        for (auto [a, b] : edges) builder.add_edge(handles[a], handles[b]);
        builder.set_entry(th, handles[0]);
        builder.set_exit(th, handles[n - 1]);
        const Program p = builder.build();
        const FlowGraph& g = p.graph(th);
        const auto& ids = g.nodes;

        // Nodes reachable from `from` in one or more steps, optionally avoiding `cut`.
        auto reachable = [&](int from, int cut) {
            std::vector<bool> seen(n, false);
            std::vector<int> stack{from};
            while (!stack.empty()) {
                const int u = stack.back();
                stack.pop_back();
                for (auto [a, b] : edges) {
                    if (a == u && b != cut && !seen[b]) {
                        seen[b] = true;
                        stack.push_back(b);
                    }
                }
            }
            return seen;
        };

        PairSet dom, nrf;
        for (int a = 0; a < n; ++a) {
            const auto avoiding = reachable(0, a);
            const auto from_a = reachable(a, -1);
            for (int b = 0; b < n; ++b) {
                if (a != b && b != 0 && (a == 0 || !avoiding[b])) dom.emplace(ids[a], ids[b]);
                if (!from_a[b]) nrf.emplace(ids[b], ids[a]);
            }
        }
        const PairSet got_dom = compute_dominates(p, g);
        const PairSet got_nrf = compute_not_reachable_from(p, g);
        if (got_dom != dom) r.fail("dominators differ on a " + std::to_string(n) + "-node graph");
        if (got_nrf != nrf) r.fail("NotReachableFrom differs on a " + std::to_string(n) + "-node graph");
        for (const auto& [a, b] : got_dom) {
            for (const auto& [c, d] : got_dom) {
                if (b == c && !got_dom.contains({a, d})) r.fail("Dominates not transitive");
            }
            if (got_dom.contains({b, a})) r.fail("Dominates not antisymmetric");
        }
        if (cyclic_nodes(p).empty() && !subset(got_dom, got_nrf)) r.fail("acyclic: Dominates not within NotReachableFrom");
    }
    return r;
}

SuiteResult oracle_inclusion_chain(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"oracle behavior inclusion SC <= TSO <= PSO <= RMO", 0, {}};
    Rng rng(seed);
    RandomProgramOptions options;
    for (std::size_t attempts = 0; r.cases < cases && attempts < 20 * cases; ++attempts) {
        std::string text;
        const Program p = random_mixed_program(rng, options, 12, &text);
        std::vector<std::set<Outcome>> outcomes;
        try {
            for (MemoryModel m : kAllModels) outcomes.push_back(oracle_outcomes(p, m));
        } catch (const oracle::LimitExceeded&) {
            continue;
        }
        ++r.cases;
        for (std::size_t i = 1; i < outcomes.size(); ++i) {
            if (!subset(outcomes[i - 1], outcomes[i])) {
                r.fail(std::string(to_string(kAllModels[i - 1])) + " behavior missing under " +
                       to_string(kAllModels[i]) + " in:\n" + text);
            }
        }
        if (outcomes[0].empty()) r.fail("no SC execution at all in:\n" + text);
    }
    return r;
}

SuiteResult naive_interleaving_agreement(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"SC oracle equals a naive interleaver", 0, {}};
    Rng rng(seed);
    RandomProgramOptions options;
    options.max_statements = 2;
    for (; r.cases < cases; ++r.cases) {
        std::string text;
        const Program p = random_small_program(rng, options, 6, &text);
        if (oracle_outcomes(p, MemoryModel::SC) != naive_sc_outcomes(p)) r.fail("outcomes differ in:\n" + text);
    }
    return r;
}

SuiteResult verdict_monotonicity(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"verdict monotonicity across models", 0, {}};
    Rng rng(seed);
    std::vector<Program> programs = corpus_programs();
    RandomProgramOptions options;
    options.loops = true;
    while (programs.size() < cases) programs.push_back(random_mixed_program(rng, options, 12));
    for (const Program& p : programs) {
        ++r.cases;
        std::vector<std::vector<bool>> proved;
        for (MemoryModel m : kAllModels) {
            AnalysisOptions o;
            o.model = m;
            std::vector<bool> row;
            for (const auto& v : analyze_all(p, o).verdicts) row.push_back(v.proved);
            proved.push_back(row);
        }
        for (std::size_t weak = 1; weak < proved.size(); ++weak) {
            for (std::size_t a = 0; a < proved[weak].size(); ++a) {
                if (proved[weak][a] && !proved[weak - 1][a]) {
                    r.fail(std::string("proved under ") + to_string(kAllModels[weak]) + " but not under " +
                           to_string(kAllModels[weak - 1]) + ":\n" + dump(p));
                }
            }
        }
    }
    return r;
}

SuiteResult determinism(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"determinism", 0, {}};
    Rng rng(seed);
    std::vector<std::pair<std::string, std::string>> sources;
    for (const auto& name : corpus_names()) sources.emplace_back(name, read_corpus(name));
    RandomProgramOptions options;
    options.loops = true;
    while (sources.size() < cases) sources.emplace_back("random", random_program(rng, options));
    for (const auto& [name, text] : sources) {
        ++r.cases;
        RunConfig config;
        config.model = kAllModels[uniform(rng, 0, 3)];
        config.format = uniform(rng, 0, 1) ? OutputFormat::Json : OutputFormat::Text;
        config.emit_relations = uniform(rng, 0, 3) == 0;
        std::ostringstream out1, out2, err1, err2;
        const int c1 = run_source(config, name, text, out1, err1);
        const int c2 = run_source(config, name, text, out2, err2);
        if (c1 != c2 || out1.str() != out2.str() || err1.str() != err2.str()) r.fail("two runs differ on " + name);
        if (dump(compile(text)) != dump(compile(text))) r.fail("two lowerings differ on " + name);
    }
    return r;
}

SuiteResult realized_reads_are_feasible(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"realized reads-from maps are never refuted", 0, {}};
    Rng rng(seed);
    std::vector<std::pair<std::string, Program>> programs;
    for (const auto& name : corpus_names()) {
        Program p = load_corpus(name);
        if (!has_loops(p) && memory_events_upper_bound(p) <= 8) programs.emplace_back(name, std::move(p));
    }
    RandomProgramOptions options;
    while (programs.size() < cases) {
        std::string text;
        Program p = random_mixed_program(rng, options, 12, &text);
        programs.emplace_back(text, std::move(p));
    }
    for (const auto& [label, p] : programs) {
        ++r.cases;
        for (MemoryModel m : kAllModels) {
            oracle::Result executions;
            try {
                executions = oracle::enumerate(p, m);
            } catch (const oracle::LimitExceeded&) {
                continue;
            }
            FeasibilityChecker checker(p, m);
            for (const auto& e : executions.executions) {
                const std::vector<NodePair> facts(e.reads_from.begin(), e.reads_from.end());
                const auto result = checker.check(facts);
                if (!result.feasible) {
                    std::ostringstream msg;
                    msg << "real execution refuted under " << to_string(m) << " witness ("
                        << result.witness->first << "," << result.witness->second << ") in:\n"
                        << label;
                    r.fail(msg.str());
                }
            }
        }
    }
    return r;
}

SuiteResult random_soundness(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"oracle violation implies ALARM on random programs", 0, {}};
    Rng rng(seed);
    RandomProgramOptions options;
    for (std::size_t attempts = 0; r.cases < cases && attempts < 20 * cases; ++attempts) {
        std::string text;
        const Program p = random_mixed_program(rng, options, 12, &text);
        bool counted = false;
        for (MemoryModel m : kAllModels) {
            std::map<NodeId, bool> violated;
            try {
                violated = oracle::violates(p, m);
            } catch (const oracle::LimitExceeded&) {
                continue;
            }
            counted = true;
            AnalysisOptions o;
            o.model = m;
            for (const auto& v : analyze_all(p, o).verdicts) {
                if (violated.at(v.node) && v.proved) {
                    r.fail(std::string("unsound PROVED under ") + to_string(m) + " at line " +
                           std::to_string(v.line) + " in:\n" + text);
                }
            }
        }
        if (counted) ++r.cases;
    }
    return r;
}

SuiteResult outer_rounds_grow(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"outer rounds never shrink the environment map", 0, {}};
    Rng rng(seed);
    std::vector<Program> programs = corpus_programs();
    RandomProgramOptions options;
    options.loops = true;
    while (programs.size() < cases) programs.push_back(random_small_program(rng, options, 12));
    for (const Program& p : programs) {
        ++r.cases;
        AnalysisOptions o;
        o.model = kAllModels[uniform(rng, 0, 3)];
        const auto result = analyze_all(p, o);
        for (std::size_t k = 1; k < result.round_envs.size(); ++k) {
            for (std::size_t n = 0; n < p.nodes().size(); ++n) {
                if (!result.round_envs[k - 1][n].leq(result.round_envs[k][n])) {
                    r.fail("node " + std::to_string(n) + " shrank in round " + std::to_string(k + 1));
                }
            }
        }
        if (!result.round_envs.empty() && !(result.round_envs.back() == result.envs)) {
            r.fail("final environment map differs from the last round");
        }
    }
    return r;
}

SuiteResult single_thread_degeneracy(std::uint64_t seed, std::size_t cases) {
    SuiteResult r{"single-thread analysis equals sequential analysis", 0, {}};
    Rng rng(seed);
    std::vector<std::pair<std::string, Program>> programs;
    for (const auto& name : corpus_names()) {
        Program p = load_corpus(name);
        if (p.threads().size() == 2 && !has_loops(p)) programs.emplace_back(name, std::move(p));
    }
    while (programs.size() < cases) {
        std::string text = random_sequential_program(rng);
        Program p = compile(text);
        if (!has_loops(p)) programs.emplace_back(std::move(text), std::move(p));
    }
    for (const auto& [label, p] : programs) {
        ++r.cases;
        const ThreadId t = p.threads().back().id;
        const EnvMap expected = sequential_envs(p, t);
        for (MemoryModel m : kAllModels) {
            AnalysisOptions o;
            o.model = m;
            const auto result = analyze_all(p, o);
            for (NodeId n : p.graph(t).nodes) {
                if (!(result.envs[n] == expected[n])) {
                    r.fail(std::string("node ") + std::to_string(n) + " under " + to_string(m) + ": " +
                           env_str(result.envs[n]) + " vs " + env_str(expected[n]) + " in:\n" + label);
                }
            }
        }
    }
    return r;
}

SuiteResult corpus_soundness_sweep() {
    SuiteResult r{"corpus soundness sweep", 0, {}};
    for (const auto& name : corpus_names()) {
        const Program p = load_corpus(name);
        for (MemoryModel m : kAllModels) {
            ++r.cases;
            std::map<NodeId, bool> violated;
            try {
                violated = oracle::violates(p, m);
            } catch (const oracle::LimitExceeded& e) {
                r.fail(name + " under " + to_string(m) + ": oracle could not run: " + e.what());
                continue;
            }
            AnalysisOptions o;
            o.model = m;
            for (const auto& v : analyze_all(p, o).verdicts) {
                if (violated.at(v.node) && v.proved) {
                    r.fail(name + ":" + std::to_string(v.line) + " PROVED under " + to_string(m) +
                           " but the oracle finds a violation");
                }
            }
        }
    }
    return r;
}

} // namespace relax::testkit
