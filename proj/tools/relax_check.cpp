#include <iostream>

#include <CLI11.hpp>

#include "relax/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Memory-model-aware interval analysis of .lit litmus programs"};
    relax::RunConfig config;
    std::string model;
    std::string format = "text";

    app.add_option("file", config.input, "Input .lit file")->required();
    app.add_option("--model", model, "Memory model: sc, tso, pso or rmo (overrides the file's model line)");
    app.add_option("--max-combinations", config.max_combinations,
                   "Interference combinations per thread before falling back to joining")
        ->check(CLI::PositiveNumber);
    app.add_flag("--oracle", config.oracle, "Cross-check verdicts against exhaustive execution");
    app.add_option("--oracle-max-events", config.oracle_limits.max_events, "Oracle memory-event budget");
    app.add_option("--oracle-max-loop-iters", config.oracle_limits.max_loop_iters, "Oracle loop unrolling bound");
    app.add_flag("--emit-relations", config.emit_relations, "Print the static and derived relations");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_flag("--timing", config.timing, "Report wall time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : relax::exit_code::Usage;
    }

    if (!model.empty()) {
        config.model = relax::parse_model(model);
        if (!config.model) {
            std::cerr << "error: unknown memory model '" << model << "' (expected sc, tso, pso or rmo)\n";
            return relax::exit_code::Usage;
        }
    }
    config.format = format == "json" ? relax::OutputFormat::Json : relax::OutputFormat::Text;
    return relax::run(config, std::cout, std::cerr);
}
