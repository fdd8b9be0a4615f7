#pragma once

#include "gpe/augmented.hpp"
#include "gpe/eigcore.hpp"
#include "gpe/mesh.hpp"

#include <array>
#include <string>
#include <vector>

namespace gpe {

struct SolverConfig {
    enum class Method { tensor, baseline, direct };

    DomainSpec domain{DomainKind::unit_square, 4};
    int n_levels = 5;
    double zeta = 0.0;
    std::array<double, 2> w_coeffs{1.0, 1.0}; // W = w0*x^2 + w1*y^2
    ScfConfig scf{};
    double c_sigma = 0.1; // inner-solve tolerance coefficient
    Method method = Method::tensor;
    unsigned seed = 0;
    int final_sweeps = 1; // correction passes on the finest level

    // adaptive-run extensions
    double theta_mark = 0.5;
    int max_dofs = 20000;

    ScalarField potential() const;
    static const char* method_name(Method m);
};

struct LevelRecord {
    int level = 0;
    int n_dofs = 0;
    double lambda = 0.0;
    int scf_iters = 0;
    int mg_cycles = 0;
    double t_linear = 0.0;
    double t_nonlinear = 0.0;
    double t_total = 0.0;
    double err_lambda = 0.0;
    bool has_err = false;
};

struct SolveReport {
    SolverConfig config;
    std::vector<LevelRecord> levels;
    Eigenpair final_pair;
    double wall_s = 0.0;
};

struct CorrectionResult {
    Eigenpair pair;
    int mg_cycles = 0;
    int scf_iters = 0;
    double t_linear = 0.0;
    double t_nonlinear = 0.0;
    double warm_alpha = 1.0;
};

/// One correction pass: inner multigrid solve of the frozen-density source
/// problem on the finest space of mg_chain, then the augmented nonlinear
/// eigensolve seeded from the restricted iterate. pair_k must live on one of
/// the chain's spaces.
CorrectionResult one_correction_step(const FeSpacePtr& V_H, const Eigenpair& pair_k,
                                     const std::vector<FeSpacePtr>& mg_chain, const ScalarField& W,
                                     double zeta, double varsigma, const ScfConfig& cfg,
                                     NonlinearUpdate mode, double warm_alpha);

SolveReport multigrid_gpe(const SolverConfig& cfg);
SolveReport baseline_multilevel(const SolverConfig& cfg);
SolveReport direct_fine_solve(const SolverConfig& cfg);

/// Timing reference: plain multigrid solves of one linear source problem per
/// level. Only n_dofs and the timing columns are meaningful.
SolveReport linear_bvp_reference(const SolverConfig& cfg);

} // namespace gpe
