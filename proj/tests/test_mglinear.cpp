#include "gpe/assemble.hpp"
#include "gpe/error.hpp"
#include "gpe/kernels.hpp"
#include "gpe/mglinear.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gpe;

namespace {

const ScalarField W_zero = [](double, double) { return 0.0; };
const ScalarField W_harmonic = [](double x, double y) { return x * x + y * y; };

std::vector<FeSpacePtr> nested_chain(DomainSpec spec, int levels) {
    std::vector<FeSpacePtr> chain;
    MeshPtr m = build_initial_mesh(spec);
    chain.push_back(FeSpace::dirichlet(m));
    for (int k = 1; k < levels; ++k) {
        m = refine_uniform(m);
        chain.push_back(FeSpace::dirichlet(m));
    }
    return chain;
}

double norm2(const std::vector<double>& v) { return std::sqrt(kernels::dot(v, v)); }

/// Asymptotic per-cycle residual contraction on a zero-rhs problem.
double contraction_factor(const MgHierarchy& h, int cycles = 8) {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(h.n_fine()));
    for (double& v : x) v = dist(rng);
    const std::vector<double> rhs(x.size(), 0.0);

    const SparseMatrix& a = h.levels.back().A;
    std::vector<double> r(x.size());
    double prev = 0.0, factor = 0.0;
    for (int c = 0; c < cycles; ++c) {
        x = vcycle(h, rhs, x);
        a.multiply(x.data(), r.data());
        const double rn = norm2(r);
        if (c > 2 && prev > 0.0) factor = std::max(factor, rn / prev);
        prev = rn;
        if (rn < 1e-250) break;
    }
    return factor;
}

} // namespace

TEST_SUITE("mglinear") {

TEST_CASE("finest matrix without coupling equals the stiffness-potential matrix") {
    auto chain = nested_chain({DomainKind::unit_square, 2}, 3);
    MgHierarchy h = build_hierarchy(chain, W_harmonic, 0.0, CoeffVec{});
    SparseMatrix direct = assemble_stiffness_potential(*chain.back(), W_harmonic);
    CHECK(add_scaled(h.levels.back().A, 1.0, direct, -1.0).max_abs() <=
          1e-14 * direct.max_abs());
}

TEST_CASE("galerkin coarse matrix equals direct coarse assembly for nested P1") {
    auto chain = nested_chain({DomainKind::unit_square, 2}, 2);
    MgHierarchy h = build_hierarchy(chain, W_zero, 0.0, CoeffVec{});
    SparseMatrix coarse_direct = assemble_stiffness_potential(*chain.front(), W_zero);
    CHECK(add_scaled(h.levels[0].A, 1.0, coarse_direct, -1.0).max_abs() <=
          1e-12 * coarse_direct.max_abs());
}

TEST_CASE("galerkin coherence holds on every level") {
    auto chain = nested_chain({DomainKind::l_shape, 1}, 4);
    FeSpacePtr fine = chain.back();
    CoeffVec density{fine, std::vector<double>(static_cast<std::size_t>(fine->n_dofs()), 0.5)};
    MgHierarchy h = build_hierarchy(chain, W_harmonic, 10.0, density);
    for (std::size_t l = 0; l + 1 < h.levels.size(); ++l) {
        SparseMatrix expect = galerkin_product(h.prolong[l], h.levels[l + 1].A);
        CHECK(add_scaled(h.levels[l].A, 1.0, expect, -1.0).max_abs() <=
              1e-12 * expect.max_abs());
    }
}

TEST_CASE("every level matrix is positive definite") {
    auto chain = nested_chain({DomainKind::unit_square, 2}, 3);
    FeSpacePtr fine = chain.back();
    CoeffVec density{fine, std::vector<double>(static_cast<std::size_t>(fine->n_dofs()), 1.0)};
    MgHierarchy h = build_hierarchy(chain, W_harmonic, 5.0, density);
    for (const auto& lev : h.levels) {
        std::vector<double> evals;
        oracle::Dense evecs;
        oracle::eig_sym(lev.A.to_dense(), evals, evecs);
        CHECK(evals[0] > 0.0);
    }
}

TEST_CASE("vcycle fixes the origin and reduces manufactured-solution error fast") {
    auto chain = nested_chain({DomainKind::unit_square, 2}, 4);
    MgHierarchy h = build_hierarchy(chain, W_zero, 0.0, CoeffVec{});
    const SparseMatrix& a = h.levels.back().A;
    const int n = a.rows();

    const std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
    CHECK(norm2(vcycle(h, zero, zero)) == 0.0);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x_true(static_cast<std::size_t>(n));
    for (double& v : x_true) v = dist(rng);
    const std::vector<double> rhs = a.multiply(x_true);

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    auto err_a = [&](const std::vector<double>& y) {
        std::vector<double> e = y;
        kernels::axpy(-1.0, x_true, e);
        return std::sqrt(a.inner(e, e));
    };
    const double e0 = err_a(x);
    for (int c = 0; c < 10; ++c) x = vcycle(h, rhs, x);
    CHECK(err_a(x) <= 1e-6 * e0);
}

TEST_CASE("per-cycle contraction is strong and does not drift with depth") {
    std::vector<double> factors;
    for (int levels : {3, 4, 5, 6}) {
        auto chain = nested_chain({DomainKind::unit_square, 2}, levels);
        MgHierarchy h = build_hierarchy(chain, W_zero, 0.0, CoeffVec{});
        factors.push_back(contraction_factor(h));
        CHECK(factors.back() <= 0.25);
    }
    const auto [lo, hi] = std::minmax_element(factors.begin(), factors.end());
    CHECK(*hi - *lo <= 0.1);
}

TEST_CASE("smoother never increases the A-norm of the error") {
    auto chain = nested_chain({DomainKind::unit_square, 2}, 2);
    MgHierarchy h = build_hierarchy(chain, W_harmonic, 0.0, CoeffVec{});
    const SparseMatrix& a = h.levels.back().A;
    const int n = a.rows();

    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x_true(static_cast<std::size_t>(n));
    for (double& v : x_true) v = dist(rng);
    const std::vector<double> rhs = a.multiply(x_true);

    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = dist(rng);

    auto err_a = [&](const std::vector<double>& y) {
        std::vector<double> e = y;
        kernels::axpy(-1.0, x_true, e);
        return a.inner(e, e);
    };
    double prev = err_a(x);
    for (int s = 0; s < 12; ++s) {
        smooth_sgs(a, rhs, x);
        const double cur = err_a(x);
        CHECK(cur <= prev * (1.0 + 1e-13));
        prev = cur;
    }
}

TEST_CASE("solve_aux is a fixed point at a discrete eigenpair and meets its tolerance") {
    auto chain = nested_chain({DomainKind::unit_square, 3}, 2);
    FeSpacePtr fine = chain.back();
    MgHierarchy h = build_hierarchy(chain, W_harmonic, 0.0, CoeffVec{});
    const SparseMatrix mass = assemble_mass(*fine);

    // exact discrete smallest pair from the oracle
    auto [lambda, x] =
        oracle::generalized_smallest(h.levels.back().A.to_dense(), mass.to_dense());

    AuxSolveResult r = solve_aux(h, lambda, x, mass, 1e-10);
    CHECK(r.cycles <= 2);
    std::vector<double> diff = r.u_tilde;
    kernels::axpy(-1.0, x, diff);
    CHECK(norm2(diff) <= 1e-8 * norm2(x));

    // tolerance contract on a non-trivial start
    std::vector<double> u0(x.size(), 1.0);
    AuxSolveResult r2 = solve_aux(h, lambda, u0, mass, 1e-10);
    std::vector<double> rhs = mass.multiply(u0);
    kernels::scal(lambda, rhs);
    std::vector<double> resid = rhs;
    std::vector<double> ax(rhs.size());
    h.levels.back().A.multiply(r2.u_tilde.data(), ax.data());
    kernels::axpy(-1.0, ax, resid);
    CHECK(norm2(resid) <= 1e-10 * norm2(rhs));
}

TEST_CASE("solve_aux cycle count is level-independent") {
    std::vector<int> cycles;
    for (int levels : {3, 4, 5, 6}) {
        auto chain = nested_chain({DomainKind::unit_square, 2}, levels);
        FeSpacePtr fine = chain.back();
        MgHierarchy h = build_hierarchy(chain, W_harmonic, 0.0, CoeffVec{});
        const SparseMatrix mass = assemble_mass(*fine);

        // a smooth-ish start vector prolonged from the coarsest space mimics
        // the production warm start
        CoeffVec bubble = interpolate(fine, [](double x, double y) {
            return x * (1.0 - x) * y * (1.0 - y);
        });
        const double h_fine = fine->mesh().max_diameter();
        AuxSolveResult r = solve_aux(h, 20.0, bubble.values, mass, 0.1 * h_fine * h_fine);
        cycles.push_back(r.cycles);
    }
    const auto [lo, hi] = std::minmax_element(cycles.begin(), cycles.end());
    CHECK(*hi - *lo <= 2);
}

TEST_CASE("a broken tolerance raises max-cycles-exceeded") {
    auto chain = nested_chain({DomainKind::unit_square, 2}, 2);
    FeSpacePtr fine = chain.back();
    MgHierarchy h = build_hierarchy(chain, W_zero, 0.0, CoeffVec{});
    const SparseMatrix mass = assemble_mass(*fine);
    std::vector<double> u0(static_cast<std::size_t>(fine->n_dofs()), 1.0);
    CHECK_THROWS_WITH_AS(solve_aux(h, 1.0, u0, mass, 1e-30, 3),
                         doctest::Contains("max-cycles-exceeded"), Error);
}

TEST_CASE("hierarchies reject non-nested space lists") {
    FeSpacePtr a = FeSpace::dirichlet(build_initial_mesh({DomainKind::unit_square, 2}));
    FeSpacePtr b = FeSpace::dirichlet(build_initial_mesh({DomainKind::unit_square, 3}));
    CHECK_THROWS_WITH_AS(build_hierarchy({a, b}, W_zero, 0.0, CoeffVec{}),
                         doctest::Contains("not-nested"), Error);
}

} // TEST_SUITE
