#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "relax/feasibility.hpp"
#include "relax/oracle.hpp"

namespace relax {

enum class OutputFormat { Text, Json };

struct RunConfig {
    std::string input;
    std::optional<MemoryModel> model; // overrides the file's `model` line
    std::size_t max_combinations = 4096;
    bool oracle = false;
    oracle::Limits oracle_limits;
    bool emit_relations = false;
    OutputFormat format = OutputFormat::Text;
    bool timing = false;
};

namespace exit_code {
inline constexpr int Proved = 0;
inline constexpr int Alarm = 1;
inline constexpr int Usage = 2;
inline constexpr int Internal = 3;
} // namespace exit_code

// Analyzes one file and writes the report to out (diagnostics to err).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Same, with the program text supplied directly; `name` labels report lines.
int run_source(const RunConfig& config, const std::string& name, const std::string& text, std::ostream& out,
               std::ostream& err);

} // namespace relax
