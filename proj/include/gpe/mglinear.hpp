#pragma once

#include "gpe/dense.hpp"
#include "gpe/fespace.hpp"
#include "gpe/sparse.hpp"

#include <vector>

namespace gpe {

/// Geometric multigrid hierarchy for the shifted diffusion operator
/// grad-grad + W + zeta*density^2. The finest matrix is assembled exactly;
/// coarser ones are Galerkin projections through the injection operators.
struct MgHierarchy {
    struct Level {
        FeSpacePtr space;
        SparseMatrix A;
    };
    std::vector<Level> levels;         // coarsest first
    std::vector<SparseMatrix> prolong; // [i]: level i -> level i+1
    int smoother_sweeps = 2;
    int coarse_direct_threshold = 500;
    DenseMatrix coarse_factor; // Cholesky factor of the coarsest matrix
    bool coarse_dense = false;

    int n_fine() const { return levels.back().A.rows(); }
};

MgHierarchy build_hierarchy(const std::vector<FeSpacePtr>& spaces, const ScalarField& W,
                            double zeta, const CoeffVec& density_finest);

/// One V-cycle with symmetric Gauss-Seidel smoothing; returns the improved
/// iterate.
std::vector<double> vcycle(const MgHierarchy& h, const std::vector<double>& rhs,
                           const std::vector<double>& x0);

/// One forward + backward Gauss-Seidel pass on A x = b, in place.
void smooth_sgs(const SparseMatrix& a, const std::vector<double>& b, std::vector<double>& x);

struct AuxSolveResult {
    std::vector<double> u_tilde;
    int cycles = 0;
};

/// Iterates V-cycles on A u = lambda_k * M * u_k from the initial guess
/// u_k until the relative residual drops below tol. Throws
/// "max-cycles-exceeded" past the cap.
AuxSolveResult solve_aux(const MgHierarchy& h, double lambda_k,
                         const std::vector<double>& u_k_fine, const SparseMatrix& mass_fine,
                         double tol, int max_cycles = 100);

} // namespace gpe
