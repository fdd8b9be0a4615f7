#include "gpe/mglinear.hpp"

#include "gpe/assemble.hpp"
#include "gpe/error.hpp"
#include "gpe/kernels.hpp"

#include <cmath>

namespace gpe {

namespace {

void gauss_seidel_forward(const SparseMatrix& a, const std::vector<double>& b,
                          std::vector<double>& x) {
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    const auto& v = a.values();
    for (int r = 0; r < a.rows(); ++r) {
        double s = b[r];
        double diag = 0.0;
        for (std::int32_t p = rp[r]; p < rp[r + 1]; ++p) {
            const std::int32_t c = ci[p];
            if (c == r) diag = v[p];
            else s -= v[p] * x[c];
        }
        x[r] = s / diag;
    }
}

void gauss_seidel_backward(const SparseMatrix& a, const std::vector<double>& b,
                           std::vector<double>& x) {
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    const auto& v = a.values();
    for (int r = a.rows() - 1; r >= 0; --r) {
        double s = b[r];
        double diag = 0.0;
        for (std::int32_t p = rp[r]; p < rp[r + 1]; ++p) {
            const std::int32_t c = ci[p];
            if (c == r) diag = v[p];
            else s -= v[p] * x[c];
        }
        x[r] = s / diag;
    }
}

void smooth(const SparseMatrix& a, const std::vector<double>& b, std::vector<double>& x,
            int sweeps) {
    for (int s = 0; s < sweeps; ++s) {
        gauss_seidel_forward(a, b, x);
        gauss_seidel_backward(a, b, x);
    }
}

void vcycle_level(const MgHierarchy& h, std::size_t lev, const std::vector<double>& rhs,
                  std::vector<double>& x) {
    const SparseMatrix& a = h.levels[lev].A;
    if (lev == 0) {
        if (h.coarse_dense) {
            x = rhs;
            cholesky_solve(h.coarse_factor, x);
        } else {
            smooth(a, rhs, x, 32); // no direct factor prepared; heavy smoothing
        }
        return;
    }
    smooth(a, rhs, x, h.smoother_sweeps);

    std::vector<double> resid(static_cast<std::size_t>(a.rows()));
    a.multiply(x.data(), resid.data());
    kernels::axpby(1.0, rhs, -1.0, resid); // resid = rhs - A x

    const SparseMatrix& p = h.prolong[lev - 1];
    std::vector<double> coarse_rhs(static_cast<std::size_t>(p.cols()), 0.0);
    // restriction = injection transpose
    {
        const auto& rp = p.row_ptr();
        const auto& ci = p.col_idx();
        const auto& v = p.values();
        for (int r = 0; r < p.rows(); ++r)
            for (std::int32_t q = rp[r]; q < rp[r + 1]; ++q)
                coarse_rhs[ci[q]] += v[q] * resid[r];
    }
    std::vector<double> coarse_x(coarse_rhs.size(), 0.0);
    vcycle_level(h, lev - 1, coarse_rhs, coarse_x);

    std::vector<double> corr(static_cast<std::size_t>(p.rows()));
    p.multiply(coarse_x.data(), corr.data());
    kernels::axpy(1.0, corr, x);

    smooth(a, rhs, x, h.smoother_sweeps);
}

} // namespace

void smooth_sgs(const SparseMatrix& a, const std::vector<double>& b, std::vector<double>& x) {
    gauss_seidel_forward(a, b, x);
    gauss_seidel_backward(a, b, x);
}

MgHierarchy build_hierarchy(const std::vector<FeSpacePtr>& spaces, const ScalarField& W,
                            double zeta, const CoeffVec& density_finest) {
    if (spaces.empty()) throw Error("not-nested", "empty space list");
    MgHierarchy h;
    h.levels.resize(spaces.size());
    for (std::size_t i = 0; i < spaces.size(); ++i) h.levels[i].space = spaces[i];

    h.prolong.reserve(spaces.size() - 1);
    for (std::size_t i = 0; i + 1 < spaces.size(); ++i) {
        try {
            h.prolong.push_back(prolongation(*spaces[i], *spaces[i + 1]));
        } catch (const Error& e) {
            if (e.code() == "not-a-descendant")
                throw Error("not-nested", "hierarchy spaces are not nested");
            throw;
        }
    }

    const FeSpacePtr& finest = spaces.back();
    SparseMatrix a = assemble_stiffness_potential(*finest, W);
    if (zeta != 0.0) {
        if (density_finest.space.get() != finest.get())
            throw Error("not-nested", "density must live on the finest space");
        a = add_scaled(a, 1.0, assemble_weighted_mass(*finest, density_finest, zeta), 1.0);
    }
    h.levels.back().A = std::move(a);
    for (std::size_t i = spaces.size() - 1; i > 0; --i)
        h.levels[i - 1].A = galerkin_product(h.prolong[i - 1], h.levels[i].A);

    if (h.levels[0].A.rows() <= h.coarse_direct_threshold) {
        h.coarse_factor = DenseMatrix::from_sparse(h.levels[0].A);
        if (!cholesky_factor(h.coarse_factor))
            throw Error("not-nested", "coarsest operator is not positive definite");
        h.coarse_dense = true;
    }
    return h;
}

std::vector<double> vcycle(const MgHierarchy& h, const std::vector<double>& rhs,
                           const std::vector<double>& x0) {
    if (static_cast<int>(rhs.size()) != h.n_fine() || rhs.size() != x0.size())
        throw Error("dimension-mismatch", "vcycle vector sizes");
    std::vector<double> x = x0;
    vcycle_level(h, h.levels.size() - 1, rhs, x);
    return x;
}

AuxSolveResult solve_aux(const MgHierarchy& h, double lambda_k,
                         const std::vector<double>& u_k_fine, const SparseMatrix& mass_fine,
                         double tol, int max_cycles) {
    if (!(tol > 0.0)) throw Error("bad-config", "solve_aux needs tol > 0");
    std::vector<double> rhs = mass_fine.multiply(u_k_fine);
    kernels::scal(lambda_k, rhs);
    const double rhs_norm = std::sqrt(kernels::dot(rhs, rhs));

    AuxSolveResult out;
    out.u_tilde = u_k_fine;
    if (rhs_norm == 0.0) return out;

    std::vector<double> resid(rhs.size());
    for (out.cycles = 0; out.cycles <= max_cycles; ++out.cycles) {
        h.levels.back().A.multiply(out.u_tilde.data(), resid.data());
        kernels::axpby(1.0, rhs, -1.0, resid);
        if (std::sqrt(kernels::dot(resid, resid)) <= tol * rhs_norm) return out;
        if (out.cycles == max_cycles) break;
        out.u_tilde = vcycle(h, rhs, out.u_tilde);
    }
    throw Error("max-cycles-exceeded", "multigrid failed to reach the requested accuracy");
}

} // namespace gpe
