#pragma once

#include "gpe/fespace.hpp"
#include "gpe/sparse.hpp"

#include <vector>

namespace gpe {

/// Smallest eigenpair of A x = lambda M x, normalized so x' M x = 1 with the
/// nonnegative-mean sign convention.
struct EigResult {
    double lambda = 0.0;
    std::vector<double> x;
    int iters = 0;
};

struct EigOptions {
    double tol = 1e-10;      // relative eigenresidual target
    int max_iters = 400;     // inverse-iteration cap (sparse path)
    int dense_threshold = 500;
    const std::vector<double>* warm_start = nullptr;
};

EigResult smallest_eigpair(const SparseMatrix& A, const SparseMatrix& M,
                           const EigOptions& opt = {});

struct ScfConfig {
    double theta = 0.5; // damping of the density update, in (0, 1]
    double tol_lambda = 1e-10;
    double tol_u = 1e-8;
    int max_iters = 200;
    // switch to constrained Newton steps once the damped iteration is in its
    // basin; keeps iteration counts flat in the coupling strength
    bool newton_polish = true;
};

struct Eigenpair {
    double lambda = 0.0;
    CoeffVec coeffs;
};

struct ScfResult {
    Eigenpair pair;
    int iters = 0;
};

/// Damped self-consistent-field iteration for the cubic nonlinear
/// eigenproblem on one space: freeze the density, solve the linearized
/// pencil, mix, repeat.
ScfResult scf_solve(const FeSpacePtr& space, const ScalarField& W, double zeta,
                    const ScfConfig& cfg, const Eigenpair* init = nullptr);

} // namespace gpe
