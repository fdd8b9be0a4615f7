#include "gpe/eigcore.hpp"

#include "gpe/assemble.hpp"
#include "gpe/dense.hpp"
#include "gpe/error.hpp"
#include "gpe/kernels.hpp"
#include "gpe/skyline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace gpe {

namespace {

double mass_mean(const SparseMatrix& m, const std::vector<double>& x) {
    std::vector<double> mx = m.multiply(x);
    double s = 0.0;
    for (double v : mx) s += v;
    return s;
}

void apply_sign_convention(const SparseMatrix& m, std::vector<double>& x) {
    const double s = mass_mean(m, x);
    if (s < 0.0) {
        kernels::scal(-1.0, x);
        return;
    }
    if (s == 0.0) {
        for (double v : x) {
            if (v != 0.0) {
                if (v < 0.0) kernels::scal(-1.0, x);
                return;
            }
        }
    }
}

double m_normalize(const SparseMatrix& m, std::vector<double>& x) {
    const double q = m.inner(x, x);
    if (!(q > 0.0)) throw Error("indefinite-mass", "vector has nonpositive mass norm");
    const double nrm = std::sqrt(q);
    kernels::scal(1.0 / nrm, x);
    return nrm;
}

EigResult smallest_dense(const SparseMatrix& a, const SparseMatrix& m) {
    DenseEigResult r =
        dense_generalized_smallest(DenseMatrix::from_sparse(a), DenseMatrix::from_sparse(m));
    EigResult out;
    out.lambda = r.lambda;
    out.x = std::move(r.x);
    out.iters = 1;
    apply_sign_convention(m, out.x);
    return out;
}

EigResult smallest_sparse(const SparseMatrix& a, const SparseMatrix& m, const EigOptions& opt) {
    const int n = a.rows();
    SkylineCholesky sky(a);
    double sigma = 0.0;
    if (!sky.factorize(a))
        throw Error("not-converged", "operator matrix is not positive definite");

    std::vector<double> x;
    if (opt.warm_start && static_cast<int>(opt.warm_start->size()) == n) x = *opt.warm_start;
    else x.assign(static_cast<std::size_t>(n), 1.0);
    m_normalize(m, x);

    std::vector<double> ax(static_cast<std::size_t>(n)), mx(static_cast<std::size_t>(n));
    double lambda = 0.0;
    for (int it = 1; it <= opt.max_iters; ++it) {
        m.multiply(x.data(), mx.data());
        std::vector<double> y = sky.solve(mx);
        m_normalize(m, y);
        // keep direction continuity between iterates
        if (kernels::dot(y, mx) < 0.0) kernels::scal(-1.0, y);
        x.swap(y);

        a.multiply(x.data(), ax.data());
        m.multiply(x.data(), mx.data());
        lambda = kernels::dot(x, ax); // x is M-normalized
        double rnorm = 0.0, anorm = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = ax[i] - lambda * mx[i];
            rnorm += r * r;
            anorm += ax[i] * ax[i];
        }
        if (std::sqrt(rnorm) <= opt.tol * std::sqrt(anorm)) {
            apply_sign_convention(m, x);
            return {lambda, std::move(x), it};
        }
        // once the Rayleigh quotient settles, refactor closer to it to speed
        // the remaining digits
        if (it % 12 == 0) {
            double trial = 0.9 * lambda;
            while (trial > sigma && !sky.factorize(a, &m, trial)) trial = 0.5 * (trial + sigma);
            if (trial > sigma) sigma = trial;
            else if (!sky.factorize(a, &m, sigma))
                throw Error("not-converged", "shift refactorization failed");
        }
    }
    throw Error("not-converged", "inverse iteration exceeded its iteration cap");
}

} // namespace

EigResult smallest_eigpair(const SparseMatrix& a, const SparseMatrix& m, const EigOptions& opt) {
    if (a.rows() != a.cols() || m.rows() != m.cols() || a.rows() != m.rows())
        throw Error("dimension-mismatch", "eigenproblem shapes");
    if (a.rows() == 0) throw Error("dimension-mismatch", "empty eigenproblem");
    if (a.rows() <= opt.dense_threshold) return smallest_dense(a, m);
    return smallest_sparse(a, m, opt);
}

namespace {

/// One constrained Newton step on A(u) u = lambda M u with u' M u = 1.
/// Returns false when the step cannot be made to reduce the eigenresidual.
struct NewtonWorkspace {
    std::unique_ptr<SkylineCholesky> skyline; // lazily built for large spaces
};

bool scf_newton_step(const FeSpacePtr& space, const SparseMatrix& a_linear,
                     const SparseMatrix& mass, double zeta, std::vector<double>& u,
                     double& lambda, NewtonWorkspace& ws, int dense_threshold) {
    const int n = static_cast<int>(u.size());
    auto operator_at = [&](const std::vector<double>& v) {
        return add_scaled(a_linear, 1.0,
                          assemble_weighted_mass(*space, CoeffVec{space, v}, zeta), 1.0);
    };
    SparseMatrix a = operator_at(u);
    std::vector<double> au = a.multiply(u), mu = mass.multiply(u);
    const double lam = kernels::dot(u, au);
    std::vector<double> f = au;
    kernels::axpy(-lam, mu, f);
    const double fnorm = std::sqrt(kernels::dot(f, f));
    if (fnorm == 0.0) {
        lambda = lam;
        return true;
    }

    // J = A(u) + 2 zeta WM(u^2) - lambda M, positive definite near the ground state
    SparseMatrix j = add_scaled(
        add_scaled(a, 1.0, assemble_weighted_mass(*space, CoeffVec{space, u}, 2.0 * zeta), 1.0),
        1.0, mass, -lam);

    std::vector<double> p, q;
    if (n <= dense_threshold) {
        DenseMatrix jd = DenseMatrix::from_sparse(j);
        if (!cholesky_factor(jd)) return false;
        p = mu;
        cholesky_solve(jd, p);
        q = f;
        cholesky_solve(jd, q);
    } else {
        if (!ws.skyline) ws.skyline = std::make_unique<SkylineCholesky>(j);
        if (!ws.skyline->factorize(j)) return false;
        p = ws.skyline->solve(mu);
        q = ws.skyline->solve(f);
    }
    const double denom = kernels::dot(mu, p);
    if (denom == 0.0) return false;
    const double dlam = kernels::dot(mu, q) / denom;
    std::vector<double> du = p;
    kernels::scal(dlam, du);
    kernels::axpy(-1.0, q, du);

    for (double t : {1.0, 0.5, 0.25, 0.125}) {
        std::vector<double> u_try = u;
        kernels::axpy(t, du, u_try);
        const double q2 = mass.inner(u_try, u_try);
        if (!(q2 > 0.0)) continue;
        kernels::scal(1.0 / std::sqrt(q2), u_try);
        SparseMatrix a_try = operator_at(u_try);
        std::vector<double> au_try = a_try.multiply(u_try);
        const double lam_try = kernels::dot(u_try, au_try);
        std::vector<double> f_try = au_try;
        std::vector<double> mu_try = mass.multiply(u_try);
        kernels::axpy(-lam_try, mu_try, f_try);
        if (std::sqrt(kernels::dot(f_try, f_try)) < fnorm) {
            u = std::move(u_try);
            lambda = lam_try;
            return true;
        }
    }
    return false;
}

} // namespace

ScfResult scf_solve(const FeSpacePtr& space, const ScalarField& W, double zeta,
                    const ScfConfig& cfg, const Eigenpair* init) {
    if (!(cfg.theta > 0.0 && cfg.theta <= 1.0) || !(cfg.tol_lambda > 0.0) || !(cfg.tol_u > 0.0))
        throw Error("bad-config", "invalid SCF configuration");
    if (space->n_dofs() == 0)
        throw Error("bad-config", "space has no interior degrees of freedom");

    const SparseMatrix a_linear = assemble_stiffness_potential(*space, W);
    const SparseMatrix mass = assemble_mass(*space);
    const double theta_cfg = zeta == 0.0 ? 1.0 : cfg.theta;

    std::vector<double> u;
    if (init && init->coeffs.space.get() == space.get() &&
        static_cast<int>(init->coeffs.values.size()) == space->n_dofs()) {
        u = init->coeffs.values;
    } else {
        // positive bubble over the bounding box biases toward the ground state
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (const Vec2& v : space->mesh().vertices()) {
            x0 = std::min(x0, v.x);
            x1 = std::max(x1, v.x);
            y0 = std::min(y0, v.y);
            y1 = std::max(y1, v.y);
        }
        CoeffVec bubble = interpolate(space, [&](double x, double y) {
            return (x - x0) * (x1 - x) * (y - y0) * (y1 - y);
        });
        u = std::move(bubble.values);
    }
    m_normalize(mass, u);

    // damped fixed-point iteration, with two stabilizers for strong coupling:
    // the damping factor backs off when successive steps anti-align, and a
    // constrained Newton step takes over once the iteration is in its basin
    double theta = theta_cfg;
    constexpr double kThetaFloor = 1.0 / 256.0;
    constexpr double kNewtonGate = 5e-2;
    double lambda_cur = 0.0;
    bool have_lambda = false;
    int newton_cooldown = 0;
    std::vector<double> prev_step;
    NewtonWorkspace ws;
    EigResult eig;

    for (int it = 1; it <= cfg.max_iters; ++it) {
        bool stepped = false;
        double du = 0.0, dl = 1e300;

        const bool try_newton =
            cfg.newton_polish && zeta != 0.0 && have_lambda && newton_cooldown == 0 &&
            !prev_step.empty() && std::sqrt(mass.inner(prev_step, prev_step)) <= kNewtonGate;
        if (try_newton) {
            std::vector<double> u_old = u;
            double lambda_new = lambda_cur;
            if (scf_newton_step(space, a_linear, mass, zeta, u, lambda_new, ws,
                                500)) {
                std::vector<double> diff = u;
                kernels::axpy(-1.0, u_old, diff);
                du = std::sqrt(mass.inner(diff, diff));
                dl = std::abs(lambda_new - lambda_cur);
                lambda_cur = lambda_new;
                prev_step = std::move(diff);
                stepped = true;
            } else {
                u = std::move(u_old);
                newton_cooldown = 3;
            }
        }

        if (!stepped) {
            SparseMatrix a = a_linear;
            if (zeta != 0.0)
                a = add_scaled(a_linear, 1.0,
                               assemble_weighted_mass(*space, CoeffVec{space, u}, zeta), 1.0);
            EigOptions opt;
            opt.warm_start = eig.x.empty() ? &u : &eig.x;
            eig = smallest_eigpair(a, mass, opt);

            std::vector<double> mu = mass.multiply(u);
            if (kernels::dot(eig.x, mu) < 0.0) kernels::scal(-1.0, eig.x);

            std::vector<double> u_next = u;
            kernels::axpby(theta, eig.x, 1.0 - theta, u_next);
            m_normalize(mass, u_next);

            std::vector<double> diff = u_next;
            kernels::axpy(-1.0, u, diff);
            du = std::sqrt(mass.inner(diff, diff));
            dl = have_lambda ? std::abs(eig.lambda - lambda_cur) : 1e300;

            if (!prev_step.empty()) {
                if (mass.inner(diff, prev_step) < 0.0) theta = std::max(kThetaFloor, 0.5 * theta);
                else theta = std::min(theta_cfg, 1.2 * theta);
            }
            prev_step = std::move(diff);
            u = std::move(u_next);
            lambda_cur = eig.lambda;
            if (newton_cooldown > 0) --newton_cooldown;
        }
        have_lambda = true;

        if (dl <= cfg.tol_lambda && du <= cfg.tol_u) {
            apply_sign_convention(mass, u);
            return {{lambda_cur, CoeffVec{space, std::move(u)}}, it};
        }
    }
    throw Error("scf-not-converged", "self-consistent iteration exceeded max_iters");
}

} // namespace gpe
