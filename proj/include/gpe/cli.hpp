#pragma once

#include <string>

namespace gpe {

struct RunManifest {
    enum class Command { solve, bench, adapt };
    Command command = Command::solve;
    std::string config_path;
    std::string out_dir;
    int repetitions = 3;        // bench timing repetitions, median reported
    std::string dump_mesh_path; // optional, solve only
};

/// Exit codes: 0 success, 1 bad config, 2 solver failure.
int run_solve(const RunManifest& m);
int run_bench(const RunManifest& m);
int run_adapt(const RunManifest& m);

} // namespace gpe
