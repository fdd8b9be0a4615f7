#include "gpe/augmented.hpp"
#include "gpe/error.hpp"
#include "gpe/kernels.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gpe;

namespace {

const ScalarField W_zero = [](double, double) { return 0.0; };
const ScalarField W_harmonic = [](double x, double y) { return x * x + y * y; };

/// Minimal statics carrying only the mass side, for synthetic bordered solves.
BorderStatics fake_mass_side(int n) {
    BorderStatics st;
    st.M_H = SparseMatrix::identity(n);
    st.c_Hh.assign(static_cast<std::size_t>(n), 0.0);
    st.gamma = 1.0;
    return st;
}

BorderedSystem synthetic(const BorderStatics& st, SparseMatrix a, std::vector<double> b,
                         double xi) {
    BorderedSystem sys;
    sys.st = &st;
    sys.A_H = std::move(a);
    sys.b_Hh = std::move(b);
    sys.xi = xi;
    return sys;
}

SparseMatrix diag(std::vector<double> d) {
    std::vector<SparseMatrix::Triplet> t;
    for (std::size_t i = 0; i < d.size(); ++i)
        t.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(i), d[i]});
    return SparseMatrix::from_triplets(static_cast<int>(d.size()), static_cast<int>(d.size()),
                                       std::move(t));
}

/// A realistic statics setup: coarse space + twice-refined fine space with a
/// normalized positive enrichment function.
struct Pipeline {
    FeSpacePtr coarse;
    FeSpacePtr fine;
    CoeffVec u_tilde;
    BorderStatics statics;
};

Pipeline make_pipeline(double zeta, const ScalarField& W, int subdivision = 3,
                       int refinements = 2) {
    Pipeline p;
    MeshPtr m = build_initial_mesh({DomainKind::unit_square, subdivision});
    p.coarse = FeSpace::dirichlet(m);
    for (int k = 0; k < refinements; ++k) m = refine_uniform(m);
    p.fine = FeSpace::dirichlet(m);

    CoeffVec bubble = interpolate(p.fine, [](double x, double y) {
        return x * (1.0 - x) * y * (1.0 - y);
    });
    SparseMatrix mass = assemble_mass(*p.fine);
    const double q = mass.inner(bubble.values, bubble.values);
    kernels::scal(1.0 / std::sqrt(q), bubble.values);
    p.u_tilde = std::move(bubble);
    p.statics = assemble_border_statics(p.coarse, p.fine, p.u_tilde, W, zeta);
    return p;
}

} // namespace

TEST_SUITE("augmented") {

TEST_CASE("decoupled border gives the border eigenpair") {
    BorderStatics st = fake_mass_side(2);
    BorderedSystem sys = synthetic(st, diag({2.0, 3.0}), {0.0, 0.0}, 1.0);
    BorderedEig r = solve_bordered(sys);
    CHECK(r.lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.alpha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r.u_H[0]) < 1e-12);
    CHECK(std::abs(r.u_H[1]) < 1e-12);
}

TEST_CASE("one-by-one block plus border") {
    BorderStatics st = fake_mass_side(1);
    BorderedSystem sys = synthetic(st, diag({2.0}), {0.0}, 5.0);
    BorderedEig r = solve_bordered(sys);
    CHECK(r.lambda == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.u_H[0] > 0.0); // nonnegative-mean rule when alpha vanishes
}

TEST_CASE("random bordered systems match the dense oracle") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int n : {3, 9, 21}) {
        BorderStatics st = fake_mass_side(n);
        std::vector<SparseMatrix::Triplet> ta;
        for (int i = 0; i < n; ++i) {
            ta.push_back({i, i, 5.0 + dist(rng)});
            if (i + 1 < n) {
                const double v = 0.4 * dist(rng);
                ta.push_back({i, i + 1, v});
                ta.push_back({i + 1, i, v});
            }
        }
        std::vector<double> b(static_cast<std::size_t>(n));
        for (double& v : b) v = 0.3 * dist(rng);
        BorderedSystem sys =
            synthetic(st, SparseMatrix::from_triplets(n, n, std::move(ta)), std::move(b), 6.0);
        BorderedEig r = solve_bordered(sys);

        oracle::Dense ab = bordered(sys.A_H, sys.b_Hh, sys.xi).to_dense();
        oracle::Dense mb = bordered(st.M_H, st.c_Hh, st.gamma).to_dense();
        auto [lref, xref] = oracle::generalized_smallest(ab, mb);
        CHECK(r.lambda == doctest::Approx(lref).epsilon(1e-10));
    }
}

TEST_CASE("an enrichment inside the coarse space is flagged as singular") {
    MeshPtr m = build_initial_mesh({DomainKind::unit_square, 3});
    FeSpacePtr s = FeSpace::dirichlet(m);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> w(static_cast<std::size_t>(s->n_dofs()));
    for (double& v : w) v = dist(rng);

    // coarse == fine makes u_tilde an element of the coarse space exactly
    BorderStatics st = assemble_border_statics(s, s, CoeffVec{s, w}, W_zero, 1.0);
    BorderedSystem sys = update_dynamic(st, std::vector<double>(w.size(), 0.0), 1.0);
    CHECK_THROWS_WITH_AS(solve_bordered(sys), doctest::Contains("mass-block-singular"), Error);
}

TEST_CASE("zero-coupling augmented iteration equals the static bordered eigenproblem") {
    Pipeline p = make_pipeline(0.0, W_harmonic);
    AugmentedSolution sol = augmented_scf(p.statics, {}, 1.0, ScfConfig{});
    CHECK(sol.iters <= 2);

    oracle::Dense ab = bordered(p.statics.A_H1, p.statics.b_Hh1, p.statics.d1).to_dense();
    oracle::Dense mb = bordered(p.statics.M_H, p.statics.c_Hh, p.statics.gamma).to_dense();
    auto [lref, xref] = oracle::generalized_smallest(ab, mb);
    CHECK(sol.lambda == doctest::Approx(lref).epsilon(1e-11));
}

TEST_CASE("the augmented iteration is a fixed point of itself") {
    Pipeline p = make_pipeline(10.0, W_harmonic);
    ScfConfig cfg;
    AugmentedSolution sol = augmented_scf(p.statics, {}, 1.0, cfg);
    AugmentedSolution again = augmented_scf(p.statics, sol.u_H, sol.alpha, cfg);
    CHECK(again.iters <= 3);
    CHECK(again.lambda == doctest::Approx(sol.lambda).epsilon(1e-10));
}

TEST_CASE("tensor and fine-requadrature iterations agree") {
    Pipeline p = make_pipeline(100.0, W_harmonic);
    ScfConfig cfg;
    cfg.tol_lambda = 1e-11;
    cfg.tol_u = 1e-9;
    AugmentedSolution a = augmented_scf(p.statics, {}, 1.0, cfg, NonlinearUpdate::tensor);
    AugmentedSolution b =
        augmented_scf(p.statics, {}, 1.0, cfg, NonlinearUpdate::fine_quadrature);
    CHECK(a.lambda == doctest::Approx(b.lambda).epsilon(1e-10));
    CHECK(a.alpha == doctest::Approx(b.alpha).epsilon(1e-8));
}

TEST_CASE("strong coupling still converges") {
    Pipeline p = make_pipeline(1000.0, W_harmonic);
    ScfConfig cfg;
    cfg.max_iters = 500;
    AugmentedSolution sol = augmented_scf(p.statics, {}, 1.0, cfg);
    CHECK(sol.iters < 200);
    CHECK(sol.lambda > 0.0);
    // block normalization
    const double q = p.statics.M_H.inner(sol.u_H, sol.u_H) +
                     2.0 * sol.alpha * kernels::dot(p.statics.c_Hh, sol.u_H) +
                     sol.alpha * sol.alpha * p.statics.gamma;
    CHECK(q == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reconstruction special cases and the Gram identity") {
    Pipeline p = make_pipeline(10.0, W_harmonic);
    const SparseMatrix mass_fine = assemble_mass(*p.fine);

    AugmentedSolution pure;
    pure.lambda = 1.0;
    pure.u_H.assign(static_cast<std::size_t>(p.coarse->n_dofs()), 0.0);
    pure.alpha = 1.0;
    Eigenpair e1 = reconstruct(pure, p.statics, &mass_fine);
    for (int i = 0; i < p.fine->n_dofs(); ++i)
        CHECK(e1.coeffs.values[i] == doctest::Approx(p.u_tilde.values[i]).epsilon(1e-12));

    // a block-normalized random combination keeps unit fine-space mass norm
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    AugmentedSolution mix;
    mix.lambda = 1.0;
    mix.u_H.assign(static_cast<std::size_t>(p.coarse->n_dofs()), 0.0);
    for (double& v : mix.u_H) v = dist(rng);
    mix.alpha = 0.8;
    const double q = p.statics.M_H.inner(mix.u_H, mix.u_H) +
                     2.0 * mix.alpha * kernels::dot(p.statics.c_Hh, mix.u_H) +
                     mix.alpha * mix.alpha * p.statics.gamma;
    kernels::scal(1.0 / std::sqrt(q), mix.u_H);
    mix.alpha /= std::sqrt(q);
    Eigenpair e2 = reconstruct(mix, p.statics, &mass_fine);
    CHECK(mass_fine.inner(e2.coeffs.values, e2.coeffs.values) ==
          doctest::Approx(1.0).epsilon(1e-11));

    // alpha = 0 reconstructs the prolonged coarse part only
    AugmentedSolution coarse_only;
    coarse_only.lambda = 1.0;
    coarse_only.u_H = mix.u_H;
    coarse_only.alpha = 0.0;
    const double qc = p.statics.M_H.inner(coarse_only.u_H, coarse_only.u_H);
    kernels::scal(1.0 / std::sqrt(qc), coarse_only.u_H);
    Eigenpair e3 = reconstruct(coarse_only, p.statics, &mass_fine);
    std::vector<double> expect = p.statics.prolong.multiply(coarse_only.u_H);
    for (int i = 0; i < p.fine->n_dofs(); ++i)
        CHECK(e3.coeffs.values[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("bordered and fine-space Rayleigh quotients coincide at the converged iterate") {
    const double zeta = 10.0;
    Pipeline p = make_pipeline(zeta, W_harmonic);
    AugmentedSolution sol = augmented_scf(p.statics, {}, 1.0, ScfConfig{});
    const SparseMatrix mass_fine = assemble_mass(*p.fine);
    Eigenpair rec = reconstruct(sol, p.statics, &mass_fine);

    // bordered quotient with the blocks frozen at the converged iterate
    BorderedSystem sys = update_dynamic(p.statics, sol.u_H, sol.alpha);
    std::vector<double> y = sol.u_H;
    y.push_back(sol.alpha);
    const SparseMatrix ab = bordered(sys.A_H, sys.b_Hh, sys.xi);
    const SparseMatrix mb = bordered(p.statics.M_H, p.statics.c_Hh, p.statics.gamma);
    const double rq_bordered = ab.inner(y, y) / mb.inner(y, y);

    // fine-space quotient with the density frozen at the reconstruction
    const SparseMatrix a_fine =
        add_scaled(assemble_stiffness_potential(*p.fine, W_harmonic), 1.0,
                   assemble_weighted_mass(*p.fine, rec.coeffs, zeta), 1.0);
    const double rq_fine = a_fine.inner(rec.coeffs.values, rec.coeffs.values) /
                           mass_fine.inner(rec.coeffs.values, rec.coeffs.values);
    CHECK(rq_bordered == doctest::Approx(rq_fine).epsilon(1e-10));
}

TEST_CASE("no fine-dimension arrays feed the per-iteration update") {
    // update_dynamic consumes coarse-sized inputs only; this asserts the
    // shapes it would reject
    Pipeline p = make_pipeline(1.0, W_zero);
    std::vector<double> wrong(static_cast<std::size_t>(p.fine->n_dofs()), 0.0);
    CHECK_THROWS_WITH_AS(update_dynamic(p.statics, wrong, 1.0),
                         doctest::Contains("dimension-mismatch"), Error);
}

} // TEST_SUITE
