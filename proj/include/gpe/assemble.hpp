#pragma once

#include "gpe/fespace.hpp"
#include "gpe/sparse.hpp"
#include "gpe/tensor.hpp"

#include <vector>

namespace gpe {

/// Matrix of the gradient-gradient plus potential form over interior DOFs.
/// The potential term uses the degree-4 rule (exact for quadratic W).
SparseMatrix assemble_stiffness_potential(const FeSpace& s, const ScalarField& W);

/// P1 mass matrix (exact local integration).
SparseMatrix assemble_mass(const FeSpace& s);

/// Matrix of zeta * rho^2 * phi_i * phi_j with rho the P1 function of the
/// given coefficients on the same space; quartic integrand, integrated
/// exactly.
SparseMatrix assemble_weighted_mass(const FeSpace& s, const CoeffVec& rho, double zeta);

/// Third-order tensor of zeta * u_tilde * phi_k phi_i phi_j over the coarse
/// basis, integrated per fine cell where everything is polynomial.
SparseTensor3 assemble_tensor(const FeSpace& coarse, const FeSpace& fine, const CoeffVec& u_tilde,
                              double zeta);

/// Everything about the augmented eigenproblem that stays fixed while the
/// low-dimensional nonlinear iteration runs. Assembled in one pass over the
/// fine cells grouped by coarse cell.
struct BorderStatics {
    FeSpacePtr coarse;
    FeSpacePtr fine;
    double zeta = 0.0;

    SparseMatrix A_H1;  // gradient + potential block on the coarse basis
    SparseMatrix A_H23; // zeta * u_tilde^2 weighted coarse mass
    SparseMatrix M_H;   // coarse mass
    SparseTensor3 T_H;  // zeta * u_tilde * phi phi phi (empty when skipped)
    bool has_tensor = false;

    std::vector<double> b_Hh1;  // grad/potential coupling of u_tilde to the coarse basis
    std::vector<double> b_Hh23; // zeta * u_tilde^3 against the coarse basis
    std::vector<double> c_Hh;   // u_tilde against the coarse basis
    double d1 = 0.0;            // energy of u_tilde in the linear part
    double xi_h = 0.0;          // zeta * integral of u_tilde^4
    double gamma = 0.0;         // integral of u_tilde^2

    CoeffVec u_tilde;
    SparseMatrix prolong; // coarse-to-fine DOF injection

    CellEmbedding embedding; // fine cells per coarse cell (reused every sweep)
};

BorderStatics assemble_border_statics(const FeSpacePtr& coarse, const FeSpacePtr& fine,
                                      const CoeffVec& u_tilde, const ScalarField& W, double zeta,
                                      bool build_tensor = true);

/// One full fine-grid reassembly of the density-dependent blocks for a given
/// coarse iterate, as the pre-tensor method does every nonlinear iteration.
struct DynamicBlocks {
    SparseMatrix A_H2;
    std::vector<double> b_Hh2;
    double d2 = 0.0;
};
DynamicBlocks assemble_dynamic_fine(const BorderStatics& st, const std::vector<double>& u_H,
                                    double alpha);

} // namespace gpe
