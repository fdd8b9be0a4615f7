#include "gpe/cli.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Ground-state solver for the cubic nonlinear Schrodinger eigenproblem"};
    app.require_subcommand(1);

    gpe::RunManifest manifest;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", manifest.config_path, "config file path")->required();
        cmd->add_option("--out", manifest.out_dir, "output directory")->required();
        cmd->add_option("--reps", manifest.repetitions, "timing repetitions (median reported)");
    };

    CLI::App* solve = app.add_subcommand("solve", "one solver run; writes report.json, levels.csv");
    add_common(solve);
    solve->add_option("--dump-mesh", manifest.dump_mesh_path, "write the final mesh as plain text");

    CLI::App* bench = app.add_subcommand("bench", "timing sweep over zeta; writes bench.csv");
    add_common(bench);

    CLI::App* adapt = app.add_subcommand("adapt", "adaptive refinement run; writes adapt.csv");
    add_common(adapt);

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) {
        manifest.command = gpe::RunManifest::Command::solve;
        return gpe::run_solve(manifest);
    }
    if (bench->parsed()) {
        manifest.command = gpe::RunManifest::Command::bench;
        return gpe::run_bench(manifest);
    }
    manifest.command = gpe::RunManifest::Command::adapt;
    return gpe::run_adapt(manifest);
}
