#pragma once

#include "gpe/assemble.hpp"
#include "gpe/eigcore.hpp"

#include <vector>

namespace gpe {

/// Per-iteration state of the low-dimensional eigenproblem: dynamic stiffness
/// side plus a view of the invariant mass side. No field scales with the fine
/// dimension.
struct BorderedSystem {
    const BorderStatics* st = nullptr;
    SparseMatrix A_H;
    std::vector<double> b_Hh;
    double xi = 0.0;
};

/// How the density-dependent blocks are refreshed each nonlinear iteration:
/// by contracting the precomputed tensor (cost tied to the coarse dimension)
/// or by a full fine-grid requadrature (the pre-tensor method).
enum class NonlinearUpdate { tensor, fine_quadrature };

BorderedSystem update_dynamic(const BorderStatics& st, const std::vector<double>& u_H,
                              double alpha);
BorderedSystem update_dynamic_fine(const BorderStatics& st, const std::vector<double>& u_H,
                                   double alpha);

struct BorderedEig {
    double lambda = 0.0;
    std::vector<double> u_H;
    double alpha = 0.0;
};

/// Smallest eigenpair of the bordered pencil, block-mass normalized, sign
/// fixed by alpha >= 0 (falling back to the nonnegative-mean rule when alpha
/// vanishes). Throws "mass-block-singular" when the enrichment function is
/// numerically inside the coarse space.
BorderedEig solve_bordered(const BorderedSystem& sys);

struct AugmentedSolution {
    double lambda = 0.0;
    std::vector<double> u_H;
    double alpha = 0.0;
    int iters = 0;
};

/// Damped fixed-point iteration on the bordered eigenproblem. Empty initial
/// coefficients start from the pure enrichment direction (u_H = 0, alpha = 1).
AugmentedSolution augmented_scf(const BorderStatics& st, std::vector<double> u0, double alpha0,
                                const ScfConfig& cfg,
                                NonlinearUpdate mode = NonlinearUpdate::tensor);

/// u = P u_H + alpha * u_tilde on the fine space, with the block-mass
/// normalization re-checked against the fine mass matrix.
Eigenpair reconstruct(const AugmentedSolution& sol, const BorderStatics& st,
                      const SparseMatrix* mass_fine = nullptr);

} // namespace gpe
