#include "relax/report.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "relax/analysis.hpp"
#include "relax/frontend.hpp"

namespace relax {

namespace {

enum class OracleVerdict { None, Agree, Imprecise, SoundnessBug };

const char* oracle_label(OracleVerdict v) {
    switch (v) {
    case OracleVerdict::Agree: return "agree";
    case OracleVerdict::Imprecise: return "analyzer imprecise";
    case OracleVerdict::SoundnessBug: return "SOUNDNESS BUG";
    case OracleVerdict::None: break;
    }
    return "";
}

std::string describe_choice(const Program& p, NodeId load, const InterferenceChoice& choice) {
    std::ostringstream out;
    out << "n" << load << " <- ";
    if (const auto* remote = std::get_if<RemoteStore>(&choice)) {
        const auto& sn = p.node(remote->store);
        out << "n" << remote->store << (sn.virtual_init ? " (initial value)" : " (" + p.graph(sn.thread).name + ")");
    } else {
        out << "own value";
    }
    return out.str();
}

struct OracleOutcome {
    bool ran = false;
    std::string problem;
    bool truncated = false;
    std::map<NodeId, bool> violated;
    std::map<NodeId, std::string> traces;
};

OracleOutcome run_oracle(const Program& p, MemoryModel model, const oracle::Limits& limits) {
    OracleOutcome out;
    try {
        const auto result = oracle::enumerate(p, model, limits);
        out.ran = true;
        out.truncated = result.truncated;
        for (const auto& node : p.nodes()) {
            if (std::holds_alternative<Assert>(node.instr)) out.violated[node.id] = false;
        }
        for (const auto& e : result.executions) {
            for (NodeId n : e.violated) {
                out.violated[n] = true;
                out.traces.try_emplace(n, oracle::format_trace(p, e));
            }
        }
    } catch (const oracle::LimitExceeded& e) {
        out.problem = e.what();
    }
    return out;
}

} // namespace

int run_source(const RunConfig& config, const std::string& name, const std::string& text, std::ostream& out,
               std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();
    Program program;
    MemoryModel model = MemoryModel::SC;
    try {
        const auto source = parse(text);
        if (config.model) {
            model = *config.model;
        } else if (source.model) {
            const auto m = parse_model(*source.model);
            if (!m) {
                err << name << ": error: unknown memory model '" << *source.model << "'\n";
                return exit_code::Usage;
            }
            model = *m;
        }
        program = lower(source);
    } catch (const FrontendError& e) {
        err << name << ":" << e.pos().line << ":" << e.pos().column << ": error: " << e.message() << "\n";
        return exit_code::Usage;
    }
    if (const auto diags = validate(program); !diags.empty()) {
        for (const auto& d : diags) {
            err << name << ": error: " << d.reason;
            if (d.node) err << " (node " << *d.node << ")";
            err << "\n";
        }
        return exit_code::Usage;
    }

    AnalysisOptions options;
    options.model = model;
    options.max_combinations = config.max_combinations;
    const AnalysisResult result = analyze_all(program, options);

    OracleOutcome oracle_outcome;
    if (config.oracle) oracle_outcome = run_oracle(program, model, config.oracle_limits);

    std::string relations;
    if (config.emit_relations) relations = FeasibilityChecker(program, model).dump();

    bool any_alarm = false;
    bool soundness_bug = false;
    std::vector<OracleVerdict> cross;
    for (const auto& v : result.verdicts) {
        any_alarm |= !v.proved;
        OracleVerdict o = OracleVerdict::None;
        if (oracle_outcome.ran) {
            const bool violated = oracle_outcome.violated.at(v.node);
            if (violated && v.proved) {
                o = OracleVerdict::SoundnessBug;
                soundness_bug = true;
            } else if (!violated && !v.proved) {
                o = OracleVerdict::Imprecise;
            } else {
                o = OracleVerdict::Agree;
            }
        }
        cross.push_back(o);
    }
    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    const Stats& st = result.stats;

    if (config.format == OutputFormat::Json) {
        nlohmann::ordered_json j;
        j["file"] = name;
        j["model"] = to_string(model);
        auto& verdicts = j["verdicts"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < result.verdicts.size(); ++i) {
            const auto& v = result.verdicts[i];
            nlohmann::ordered_json jv;
            jv["line"] = v.line;
            jv["node"] = v.node;
            jv["thread"] = program.graph(v.thread).name;
            jv["status"] = v.proved ? "PROVED" : "ALARM";
            if (v.witness) {
                auto& w = jv["witness"] = nlohmann::ordered_json::array();
                for (const auto& [load, choice] : *v.witness) {
                    nlohmann::ordered_json c;
                    c["load"] = load;
                    if (const auto* remote = std::get_if<RemoteStore>(&choice)) {
                        c["store"] = remote->store;
                    } else {
                        c["store"] = nullptr;
                    }
                    w.push_back(c);
                }
            } else {
                jv["witness"] = nullptr;
            }
            if (cross[i] != OracleVerdict::None) {
                jv["oracle"] = oracle_label(cross[i]);
            } else {
                jv["oracle"] = nullptr;
            }
            verdicts.push_back(jv);
        }
        auto& js = j["stats"];
        js["threads"] = st.threads;
        js["nodes"] = st.nodes;
        js["outer_rounds"] = st.rounds;
        js["combinations_enumerated"] = st.enumerated;
        js["combinations_pruned"] = st.pruned;
        js["combinations_enumerated_all_rounds"] = st.enumerated_all_rounds;
        js["combinations_pruned_all_rounds"] = st.pruned_all_rounds;
        auto& per = js["per_thread"] = nlohmann::ordered_json::array();
        for (const auto& ts : st.per_thread) {
            nlohmann::ordered_json t;
            t["thread"] = ts.name;
            t["loads"] = ts.loads;
            t["loop_loads"] = ts.loop_loads;
            t["enumerated"] = ts.enumerated;
            t["pruned"] = ts.pruned;
            t["overflow"] = ts.overflow;
            per.push_back(t);
        }
        if (config.oracle) {
            auto& jo = j["oracle"];
            jo["ran"] = oracle_outcome.ran;
            jo["truncated"] = oracle_outcome.truncated;
            if (!oracle_outcome.ran) jo["problem"] = oracle_outcome.problem;
        }
        if (config.emit_relations) {
            auto& jr = j["relations"] = nlohmann::ordered_json::array();
            std::istringstream lines(relations);
            for (std::string line; std::getline(lines, line);) jr.push_back(line);
        }
        if (config.timing) j["wall_time_ms"] = elapsed_ms;
        out << j.dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < result.verdicts.size(); ++i) {
            const auto& v = result.verdicts[i];
            out << name << ":" << v.line << ": " << (v.proved ? "PROVED" : "ALARM") << " under " << to_string(model);
            if (cross[i] != OracleVerdict::None) out << "  oracle: " << oracle_label(cross[i]);
            out << "\n";
            if (v.witness && !v.witness->empty()) {
                out << "  combination:";
                bool first = true;
                for (const auto& [load, choice] : *v.witness) {
                    out << (first ? " " : ", ") << describe_choice(program, load, choice);
                    first = false;
                }
                out << "\n";
            }
            if (cross[i] != OracleVerdict::None && oracle_outcome.traces.contains(v.node)) {
                out << "  oracle trace: " << oracle_outcome.traces.at(v.node) << "\n";
            }
        }
        if (config.oracle && !oracle_outcome.ran) out << "oracle: not run (" << oracle_outcome.problem << ")\n";
        if (config.oracle && oracle_outcome.truncated) out << "oracle: loop bound reached, executions truncated\n";
        out << "stats:\n";
        out << "  threads: " << st.threads << "\n";
        out << "  nodes: " << st.nodes << "\n";
        out << "  outer rounds: " << st.rounds << "\n";
        out << "  combinations enumerated: " << st.enumerated << " (all rounds: " << st.enumerated_all_rounds
            << ")\n";
        out << "  combinations pruned infeasible: " << st.pruned << " (all rounds: " << st.pruned_all_rounds << ")\n";
        for (const auto& ts : st.per_thread) {
            if (ts.loads == 0) continue;
            out << "  thread " << ts.name << ": loads " << ts.loads << ", in loops " << ts.loop_loads
                << ", enumerated " << ts.enumerated << ", pruned " << ts.pruned
                << (ts.overflow ? ", over the combination cap" : "") << "\n";
        }
        if (config.timing) out << "  wall time: " << static_cast<long long>(elapsed_ms) << " ms\n";
        if (config.emit_relations) out << "relations:\n" << relations;
    }

    if (soundness_bug) return exit_code::Internal;
    return any_alarm ? exit_code::Alarm : exit_code::Proved;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    std::ifstream in(config.input);
    if (!in) {
        err << config.input << ": error: cannot read file\n";
        return exit_code::Usage;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return run_source(config, config.input, buffer.str(), out, err);
    } catch (const std::exception& e) {
        err << config.input << ": internal error: " << e.what() << "\n";
        return exit_code::Internal;
    }
}

} // namespace relax
