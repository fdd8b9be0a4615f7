#pragma once

#include "gpe/driver.hpp"

#include <cstdint>
#include <vector>

namespace gpe {

/// Per-cell squared residual indicators eta^2(K) and their root-sum total.
struct EstimatorField {
    std::vector<double> eta_sq;
    double total_eta = 0.0;
};

/// Residual estimator: cell term h_K^2 ||lambda u - W u - zeta u^3||^2 (the
/// P1 Laplacian vanishes inside cells) plus the gradient jump across each
/// interior edge, counted for both adjacent cells.
EstimatorField estimate(const FeSpace& space, const Eigenpair& pair, const ScalarField& W,
                        double zeta);

/// Smallest set of cells, by descending eta^2 with index ties ascending,
/// whose indicators sum to at least theta_mark times the total.
std::vector<std::int32_t> mark_dorfler(const EstimatorField& est, double theta_mark);

struct AdaptRecord {
    int iter = 0;
    int n_dofs = 0;
    double lambda = 0.0;
    double total_eta = 0.0;
    double t_total = 0.0;
};

struct AdaptReport {
    SolverConfig config;
    std::vector<AdaptRecord> records;
    Eigenpair final_pair;
    double wall_s = 0.0;
};

/// Solve-estimate-mark-refine loop with the coarse space held fixed as the
/// augmentation base; stops once max_dofs is reached.
AdaptReport adaptive_loop(const SolverConfig& cfg);

} // namespace gpe
