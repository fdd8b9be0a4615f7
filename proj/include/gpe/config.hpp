#pragma once

#include "gpe/driver.hpp"

#include <string>
#include <vector>

namespace gpe {

struct BenchConfig {
    std::vector<double> zeta_values{1.0};
    std::vector<std::string> methods{"tensor"};
};

struct ParsedConfig {
    SolverConfig solver;
    BenchConfig bench;
};

/// Parses the flat key = value format with [scf] and [bench] sections.
/// Unknown keys raise Error("bad-config") naming the offending key.
ParsedConfig load_config(const std::string& path);
ParsedConfig parse_config_text(const std::string& text);

} // namespace gpe
