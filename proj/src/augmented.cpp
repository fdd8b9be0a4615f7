#include "gpe/augmented.hpp"

#include "gpe/dense.hpp"
#include "gpe/error.hpp"
#include "gpe/kernels.hpp"
#include "gpe/eigcore.hpp"

#include <cmath>

namespace gpe {

namespace {

/// Block mass inner product <(u,a),(v,b)> = u'M v + a c'v + b c'u + a b gamma.
double block_mass_inner(const BorderStatics& st, const std::vector<double>& u, double a,
                        const std::vector<double>& v, double b) {
    return st.M_H.inner(u, v) + a * kernels::dot(st.c_Hh, v) + b * kernels::dot(st.c_Hh, u) +
           a * b * st.gamma;
}

void block_normalize(const BorderStatics& st, std::vector<double>& u, double& a) {
    const double q = block_mass_inner(st, u, a, u, a);
    if (!(q > 0.0)) throw Error("mass-block-singular", "iterate has nonpositive block-mass norm");
    const double s = 1.0 / std::sqrt(q);
    kernels::scal(s, u);
    a *= s;
}

void dense_bordered_pair(const BorderedSystem& sys, DenseMatrix& a, DenseMatrix& m) {
    const BorderStatics& st = *sys.st;
    const int n = sys.A_H.rows();
    a = DenseMatrix(n + 1, n + 1);
    m = DenseMatrix(n + 1, n + 1);
    {
        DenseMatrix ad = DenseMatrix::from_sparse(sys.A_H);
        DenseMatrix md = DenseMatrix::from_sparse(st.M_H);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                a(r, c) = ad(r, c);
                m(r, c) = md(r, c);
            }
    }
    for (int i = 0; i < n; ++i) {
        a(i, n) = a(n, i) = sys.b_Hh[i];
        m(i, n) = m(n, i) = st.c_Hh[i];
    }
    a(n, n) = sys.xi;
    m(n, n) = st.gamma;
}

/// Constrained Newton step on the bordered pencil; the Jacobian of the cubic
/// term is three times the quadratic-density block, which both update routes
/// already produce.
bool bordered_newton_step(const BorderStatics& st, NonlinearUpdate mode, std::vector<double>& u,
                          double& alpha, double& lambda) {
    const int n = st.A_H1.rows();
    auto eval = [&](const std::vector<double>& uu, double aa) {
        return mode == NonlinearUpdate::tensor ? update_dynamic(st, uu, aa)
                                               : update_dynamic_fine(st, uu, aa);
    };

    auto residual = [&](const BorderedSystem& sys, const std::vector<double>& y, double& lam,
                        std::vector<double>& f, std::vector<double>& my) {
        DenseMatrix ab, mb;
        dense_bordered_pair(sys, ab, mb);
        const std::vector<double> ay = ab.multiply(y);
        my = mb.multiply(y);
        lam = kernels::dot(y, ay) / kernels::dot(y, my);
        f = ay;
        kernels::axpy(-lam, my, f);
        return std::sqrt(kernels::dot(f, f));
    };

    std::vector<double> y(u);
    y.push_back(alpha);
    BorderedSystem sys = eval(u, alpha);
    double lam = lambda;
    std::vector<double> f, my;
    const double fnorm = residual(sys, y, lam, f, my);
    if (fnorm == 0.0) {
        lambda = lam;
        return true;
    }

    DenseMatrix ab, mb;
    dense_bordered_pair(sys, ab, mb);
    // KKT matrix [[A + 2*Dyn - lam*M, -M y], [-(M y)', 0]]
    DenseMatrix kkt(n + 2, n + 2);
    {
        const SparseMatrix dyn_m = add_scaled(sys.A_H, 1.0, st.A_H1, -1.0);
        DenseMatrix dynd = DenseMatrix::from_sparse(dyn_m);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                kkt(r, c) = ab(r, c) + 2.0 * dynd(r, c) - lam * mb(r, c);
        for (int i = 0; i < n; ++i) {
            const double dyn_b = sys.b_Hh[i] - st.b_Hh1[i];
            kkt(i, n) = kkt(n, i) = ab(i, n) + 2.0 * dyn_b - lam * mb(i, n);
        }
        const double dyn_s = sys.xi - st.d1;
        kkt(n, n) = ab(n, n) + 2.0 * dyn_s - lam * mb(n, n);
        for (int i = 0; i <= n; ++i) {
            kkt(i, n + 1) = kkt(n + 1, i) = -my[i];
        }
        kkt(n + 1, n + 1) = 0.0;
    }
    std::vector<double> rhs(static_cast<std::size_t>(n) + 2, 0.0);
    for (int i = 0; i <= n; ++i) rhs[i] = -f[i];
    if (!lu_solve(kkt, rhs)) return false;

    for (double t : {1.0, 0.5, 0.25, 0.125}) {
        std::vector<double> u_try = u;
        double a_try = alpha + t * rhs[n];
        for (int i = 0; i < n; ++i) u_try[i] += t * rhs[i];
        const double q = block_mass_inner(st, u_try, a_try, u_try, a_try);
        if (!(q > 0.0)) continue;
        const double s = 1.0 / std::sqrt(q);
        kernels::scal(s, u_try);
        a_try *= s;

        std::vector<double> y_try(u_try);
        y_try.push_back(a_try);
        BorderedSystem sys_try = eval(u_try, a_try);
        double lam_try = lam;
        std::vector<double> f_try, my_try;
        if (residual(sys_try, y_try, lam_try, f_try, my_try) < fnorm) {
            u = std::move(u_try);
            alpha = a_try;
            lambda = lam_try;
            return true;
        }
    }
    return false;
}

} // namespace

BorderedSystem update_dynamic(const BorderStatics& st, const std::vector<double>& u_H,
                              double alpha) {
    const int n = st.A_H1.rows();
    if (static_cast<int>(u_H.size()) != n)
        throw Error("dimension-mismatch", "coarse iterate length");
    if (!st.has_tensor)
        throw Error("dimension-mismatch", "statics were assembled without the tensor");

    BorderedSystem sys;
    sys.st = &st;

    // quadratic-in-density block: coarse requadrature + one tensor contraction
    const SparseMatrix a21 =
        assemble_weighted_mass(*st.coarse, CoeffVec{st.coarse, u_H}, st.zeta);
    const SparseMatrix a22 = st.T_H.contract_mode3(u_H);

    sys.A_H = add_scaled(add_scaled(st.A_H1, 1.0, a21, 1.0), 1.0,
                         add_scaled(a22, 2.0 * alpha, st.A_H23, alpha * alpha), 1.0);

    // border vector pieces fall out of the same contractions
    std::vector<double> b21 = a22.multiply(u_H);
    std::vector<double> b22 = st.A_H23.multiply(u_H);
    sys.b_Hh = st.b_Hh1;
    kernels::axpy(1.0, b21, sys.b_Hh);
    kernels::axpy(2.0 * alpha, b22, sys.b_Hh);
    kernels::axpy(alpha * alpha, st.b_Hh23, sys.b_Hh);

    const double d2 = kernels::dot(u_H, b22) + 2.0 * alpha * kernels::dot(u_H, st.b_Hh23) +
                      alpha * alpha * st.xi_h;
    sys.xi = st.d1 + d2;
    return sys;
}

BorderedSystem update_dynamic_fine(const BorderStatics& st, const std::vector<double>& u_H,
                                   double alpha) {
    BorderedSystem sys;
    sys.st = &st;
    DynamicBlocks dyn = assemble_dynamic_fine(st, u_H, alpha);
    sys.A_H = add_scaled(st.A_H1, 1.0, dyn.A_H2, 1.0);
    sys.b_Hh = st.b_Hh1;
    kernels::axpy(1.0, dyn.b_Hh2, sys.b_Hh);
    sys.xi = st.d1 + dyn.d2;
    return sys;
}

BorderedEig solve_bordered(const BorderedSystem& sys) {
    const BorderStatics& st = *sys.st;
    const int n = sys.A_H.rows();
    constexpr int kDenseLimit = 2000;

    double lambda = 0.0;
    std::vector<double> x;
    if (n <= kDenseLimit) {
        DenseMatrix a(n + 1, n + 1), b(n + 1, n + 1);
        {
            DenseMatrix ad = DenseMatrix::from_sparse(sys.A_H);
            DenseMatrix md = DenseMatrix::from_sparse(st.M_H);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    a(r, c) = ad(r, c);
                    b(r, c) = md(r, c);
                }
        }
        for (int i = 0; i < n; ++i) {
            a(i, n) = a(n, i) = sys.b_Hh[i];
            b(i, n) = b(n, i) = st.c_Hh[i];
        }
        a(n, n) = sys.xi;
        b(n, n) = st.gamma;

        DenseEigResult r;
        try {
            r = dense_generalized_smallest(a, b, 1e-12);
        } catch (const Error& e) {
            if (e.code() == "indefinite-mass")
                throw Error("mass-block-singular", "bordered mass block is not positive definite");
            throw;
        }
        lambda = r.lambda;
        x = std::move(r.x);
    } else {
        // inverse iteration on the sparse bordered blocks
        const SparseMatrix ab = bordered(sys.A_H, sys.b_Hh, sys.xi);
        const SparseMatrix mb = bordered(st.M_H, st.c_Hh, st.gamma);
        EigOptions opt;
        opt.dense_threshold = 0;
        try {
            EigResult r = smallest_eigpair(ab, mb, opt);
            lambda = r.lambda;
            x = std::move(r.x);
        } catch (const Error& e) {
            if (e.code() == "indefinite-mass")
                throw Error("mass-block-singular", "bordered mass block is not positive definite");
            throw;
        }
    }

    BorderedEig out;
    out.lambda = lambda;
    out.alpha = x[n];
    out.u_H.assign(x.begin(), x.begin() + n);

    if (std::abs(out.alpha) > 1e-14) {
        if (out.alpha < 0.0) {
            kernels::scal(-1.0, out.u_H);
            out.alpha = -out.alpha;
        }
    } else {
        std::vector<double> mu = st.M_H.multiply(out.u_H);
        double mean = 0.0;
        for (double v : mu) mean += v;
        if (mean < 0.0) {
            kernels::scal(-1.0, out.u_H);
            out.alpha = -out.alpha;
        }
    }
    return out;
}

AugmentedSolution augmented_scf(const BorderStatics& st, std::vector<double> u0, double alpha0,
                                const ScfConfig& cfg, NonlinearUpdate mode) {
    const int n = st.A_H1.rows();
    if (u0.empty()) {
        u0.assign(static_cast<std::size_t>(n), 0.0);
        alpha0 = 1.0;
    }
    if (static_cast<int>(u0.size()) != n)
        throw Error("dimension-mismatch", "augmented initial iterate length");
    block_normalize(st, u0, alpha0);

    const double theta_cfg = st.zeta == 0.0 ? 1.0 : cfg.theta;
    std::vector<double> u = std::move(u0);
    double alpha = alpha0;

    double theta = theta_cfg;
    constexpr double kThetaFloor = 1.0 / 256.0;
    constexpr double kNewtonGate = 5e-2;
    double lambda_cur = 0.0;
    bool have_lambda = false;
    int newton_cooldown = 0;
    double prev_step_norm = 1e300;
    std::vector<double> prev_step_u;
    double prev_step_a = 0.0;

    for (int it = 1; it <= cfg.max_iters; ++it) {
        bool stepped = false;
        double du = 0.0, dl = 1e300;

        const bool try_newton = cfg.newton_polish && st.zeta != 0.0 && have_lambda &&
                                newton_cooldown == 0 && prev_step_norm <= kNewtonGate;
        if (try_newton) {
            std::vector<double> u_old = u;
            const double alpha_old = alpha;
            double lambda_new = lambda_cur;
            if (bordered_newton_step(st, mode, u, alpha, lambda_new)) {
                std::vector<double> diff = u;
                kernels::axpy(-1.0, u_old, diff);
                const double da = alpha - alpha_old;
                du = std::sqrt(std::max(0.0, block_mass_inner(st, diff, da, diff, da)));
                dl = std::abs(lambda_new - lambda_cur);
                lambda_cur = lambda_new;
                prev_step_u = std::move(diff);
                prev_step_a = da;
                prev_step_norm = du;
                stepped = true;
            } else {
                u = std::move(u_old);
                alpha = alpha_old;
                newton_cooldown = 3;
            }
        }

        if (!stepped) {
            const BorderedSystem sys = mode == NonlinearUpdate::tensor
                                           ? update_dynamic(st, u, alpha)
                                           : update_dynamic_fine(st, u, alpha);
            BorderedEig eig = solve_bordered(sys);

            // sign continuity against the current iterate
            if (block_mass_inner(st, eig.u_H, eig.alpha, u, alpha) < 0.0) {
                kernels::scal(-1.0, eig.u_H);
                eig.alpha = -eig.alpha;
            }

            std::vector<double> u_next = u;
            kernels::axpby(theta, eig.u_H, 1.0 - theta, u_next);
            double alpha_next = (1.0 - theta) * alpha + theta * eig.alpha;
            block_normalize(st, u_next, alpha_next);

            std::vector<double> diff = u_next;
            kernels::axpy(-1.0, u, diff);
            const double da = alpha_next - alpha;
            du = std::sqrt(std::max(0.0, block_mass_inner(st, diff, da, diff, da)));
            dl = have_lambda ? std::abs(eig.lambda - lambda_cur) : 1e300;

            if (!prev_step_u.empty()) {
                const double corr =
                    block_mass_inner(st, diff, da, prev_step_u, prev_step_a);
                if (corr < 0.0) theta = std::max(kThetaFloor, 0.5 * theta);
                else theta = std::min(theta_cfg, 1.2 * theta);
            }
            prev_step_u = std::move(diff);
            prev_step_a = da;
            prev_step_norm = du;
            u = std::move(u_next);
            alpha = alpha_next;
            lambda_cur = eig.lambda;
            if (newton_cooldown > 0) --newton_cooldown;
        }
        have_lambda = true;

        if (dl <= cfg.tol_lambda && du <= cfg.tol_u) {
            AugmentedSolution sol;
            sol.lambda = lambda_cur;
            // final sign normalization as in the single-shot bordered solve
            if (std::abs(alpha) > 1e-14) {
                if (alpha < 0.0) {
                    kernels::scal(-1.0, u);
                    alpha = -alpha;
                }
            } else {
                std::vector<double> mu = st.M_H.multiply(u);
                double mean = 0.0;
                for (double v : mu) mean += v;
                if (mean < 0.0) {
                    kernels::scal(-1.0, u);
                    alpha = -alpha;
                }
            }
            sol.u_H = std::move(u);
            sol.alpha = alpha;
            sol.iters = it;
            return sol;
        }
    }
    throw Error("scf-not-converged", "augmented nonlinear iteration exceeded max_iters");
}

Eigenpair reconstruct(const AugmentedSolution& sol, const BorderStatics& st,
                      const SparseMatrix* mass_fine) {
    std::vector<double> fine = st.prolong.multiply(sol.u_H);
    kernels::axpy(sol.alpha, st.u_tilde.values, fine);

    SparseMatrix local_mass;
    if (!mass_fine) {
        local_mass = assemble_mass(*st.fine);
        mass_fine = &local_mass;
    }
    const double q = mass_fine->inner(fine, fine);
    if (std::abs(q - 1.0) > 1e-10)
        throw Error("normalization-violated", "fine-space mass norm drifted from one");
    kernels::scal(1.0 / std::sqrt(q), fine);

    Eigenpair out;
    out.lambda = sol.lambda;
    out.coeffs = CoeffVec{st.fine, std::move(fine)};
    return out;
}

} // namespace gpe
