#include "gpe/cli.hpp"

#include "gpe/config.hpp"
#include "gpe/error.hpp"
#include "gpe/report.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <vector>

namespace gpe {

namespace {

int config_failure(const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
}

int solver_failure(const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("io-error", "cannot create output directory '" + dir + "'");
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

int run_solve(const RunManifest& m) {
    ParsedConfig cfg;
    try {
        cfg = load_config(m.config_path);
        ensure_out_dir(m.out_dir);
    } catch (const Error& e) {
        return config_failure(e);
    }

    try {
        SolveReport report;
        switch (cfg.solver.method) {
        case SolverConfig::Method::tensor: report = multigrid_gpe(cfg.solver); break;
        case SolverConfig::Method::baseline: report = baseline_multilevel(cfg.solver); break;
        case SolverConfig::Method::direct: report = direct_fine_solve(cfg.solver); break;
        }
        write_text_file(m.out_dir + "/report.json", report_to_json(report));
        write_text_file(m.out_dir + "/levels.csv", levels_to_csv(report));
        if (!m.dump_mesh_path.empty())
            write_text_file(m.dump_mesh_path,
                            dump_mesh(report.final_pair.coeffs.space->mesh()));
        return 0;
    } catch (const std::exception& e) {
        return solver_failure(e);
    }
}

int run_bench(const RunManifest& m) {
    ParsedConfig cfg;
    try {
        cfg = load_config(m.config_path);
        ensure_out_dir(m.out_dir);
        if (m.repetitions < 1) throw Error("bad-config", "repetitions must be >= 1");
    } catch (const Error& e) {
        return config_failure(e);
    }

    try {
        std::vector<BenchRow> rows;
        for (const std::string& method : cfg.bench.methods) {
            for (double zeta : cfg.bench.zeta_values) {
                SolverConfig run_cfg = cfg.solver;
                run_cfg.zeta = zeta;

                // per (level) timing samples across repetitions
                std::vector<std::vector<double>> samples;
                SolveReport last;
                for (int rep = 0; rep < m.repetitions; ++rep) {
                    if (method == "tensor") {
                        run_cfg.method = SolverConfig::Method::tensor;
                        last = multigrid_gpe(run_cfg);
                    } else if (method == "baseline") {
                        run_cfg.method = SolverConfig::Method::baseline;
                        last = baseline_multilevel(run_cfg);
                    } else { // direct-linear
                        last = linear_bvp_reference(run_cfg);
                    }
                    if (samples.empty()) samples.resize(last.levels.size());
                    for (std::size_t i = 0; i < last.levels.size(); ++i)
                        samples[i].push_back(last.levels[i].t_total);
                }
                for (std::size_t i = 0; i < last.levels.size(); ++i)
                    rows.push_back({method, zeta, last.levels[i].level, last.levels[i].n_dofs,
                                    median(samples[i])});
            }
        }
        write_text_file(m.out_dir + "/bench.csv", bench_to_csv(rows));
        return 0;
    } catch (const std::exception& e) {
        return solver_failure(e);
    }
}

int run_adapt(const RunManifest& m) {
    ParsedConfig cfg;
    try {
        cfg = load_config(m.config_path);
        ensure_out_dir(m.out_dir);
    } catch (const Error& e) {
        return config_failure(e);
    }

    try {
        AdaptReport report = adaptive_loop(cfg.solver);
        write_text_file(m.out_dir + "/adapt.csv", adapt_to_csv(report));
        return 0;
    } catch (const std::exception& e) {
        return solver_failure(e);
    }
}

} // namespace gpe
