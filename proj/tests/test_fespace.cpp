#include "gpe/assemble.hpp"
#include "gpe/error.hpp"
#include "gpe/fespace.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gpe;

TEST_SUITE("fespace") {

TEST_CASE("quadrature weights are positive and sum to one") {
    for (int deg = 1; deg <= 6; ++deg) {
        const QuadRule& r = quad_rule(deg);
        CHECK(r.exact_degree >= deg);
        double sum = 0.0;
        for (double w : r.weights) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK_THROWS_WITH_AS(quad_rule(7), doctest::Contains("degree-unsupported"), Error);
    CHECK_THROWS_AS(quad_rule(0), Error);
}

TEST_CASE("degree-1 rule is the centroid, degree-2 the edge midpoints") {
    const QuadRule& r1 = quad_rule(1);
    REQUIRE(r1.points.size() == 1);
    CHECK(r1.points[0].l0 == doctest::Approx(1.0 / 3.0));
    CHECK(r1.weights[0] == doctest::Approx(1.0));

    const QuadRule& r2 = quad_rule(2);
    REQUIRE(r2.points.size() == 3);
    for (double w : r2.weights) CHECK(w == doctest::Approx(1.0 / 3.0));
    for (const auto& p : r2.points) {
        int zeros = (p.l0 == 0.0) + (p.l1 == 0.0) + (p.l2 == 0.0);
        CHECK(zeros == 1); // midpoints sit on the edges
    }
}

TEST_CASE("rules integrate reference-triangle monomials exactly up to their degree") {
    // reference triangle (0,0), (1,0), (0,1): area 1/2, so the rule value is
    // 0.5 * sum w f; compare against p! q! / (p+q+2)!
    for (int deg = 1; deg <= 6; ++deg) {
        const QuadRule& r = quad_rule(deg);
        for (int p = 0; p + 0 <= r.exact_degree; ++p) {
            for (int q = 0; p + q <= r.exact_degree; ++q) {
                double s = 0.0;
                for (std::size_t k = 0; k < r.points.size(); ++k) {
                    const double x = r.points[k].l1, y = r.points[k].l2;
                    s += r.weights[k] * std::pow(x, p) * std::pow(y, q);
                }
                const double exact = oracle::simplex_moment(p, q);
                CHECK(0.5 * s == doctest::Approx(exact).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("x^2 y^2 (total degree 4) separates the degree-2 and degree-4 rules") {
    const double exact = oracle::simplex_moment(2, 2); // 1/180
    CHECK(exact == doctest::Approx(1.0 / 180.0));

    auto apply = [](const QuadRule& r) {
        double s = 0.0;
        for (std::size_t k = 0; k < r.points.size(); ++k)
            s += r.weights[k] * (r.points[k].l1 * r.points[k].l1) *
                 (r.points[k].l2 * r.points[k].l2);
        return 0.5 * s;
    };
    CHECK(std::abs(apply(quad_rule(2)) - exact) > 1e-6); // under-integrated
    CHECK(std::abs(apply(quad_rule(4)) - exact) <= 1e-15);
    CHECK(std::abs(apply(quad_rule(6)) - exact) <= 1e-15);
}

TEST_CASE("dirichlet spaces constrain exactly the boundary vertices") {
    MeshPtr m = build_initial_mesh({DomainKind::unit_square, 3});
    FeSpacePtr s = FeSpace::dirichlet(m);
    CHECK(s->n_dofs() == 4); // interior grid of a 3x3 subdivision
    for (int v = 0; v < m->n_vertices(); ++v)
        CHECK((s->dof_of_vertex(v) < 0) == m->vertex_on_boundary(v));
    // interior_dofs sorted ascending
    for (int d = 1; d < s->n_dofs(); ++d)
        CHECK(s->interior_dofs()[d] > s->interior_dofs()[d - 1]);

    FeSpacePtr all = FeSpace::unconstrained(m);
    CHECK(all->n_dofs() == m->n_vertices());
}

TEST_CASE("interpolation samples nodal values") {
    MeshPtr m = build_initial_mesh({DomainKind::unit_square, 4});
    FeSpacePtr s = FeSpace::dirichlet(m);

    CoeffVec zero = interpolate(s, [](double, double) { return 0.0; });
    for (double v : zero.values) CHECK(v == 0.0);

    CoeffVec xf = interpolate(s, [](double x, double) { return x; });
    for (int d = 0; d < s->n_dofs(); ++d)
        CHECK(xf.values[d] == m->vertices()[s->interior_dofs()[d]].x);
}

TEST_CASE("interpolated coarse hat takes value one at itself and half at edge midpoints") {
    MeshPtr m = build_initial_mesh({DomainKind::unit_square, 2});
    FeSpacePtr coarse = FeSpace::dirichlet(m);
    REQUIRE(coarse->n_dofs() == 1);
    const std::int32_t center = coarse->interior_dofs()[0];

    MeshPtr fine_mesh = refine_uniform(m);
    FeSpacePtr fine = FeSpace::dirichlet(fine_mesh);
    SparseMatrix p = prolongation(*coarse, *fine);
    std::vector<double> hat_fine = p.multiply(std::vector<double>{1.0});

    for (int d = 0; d < fine->n_dofs(); ++d) {
        const std::int32_t v = fine_mesh->vertex_parents()[fine->interior_dofs()[d]].original()
                                   ? fine->interior_dofs()[d]
                                   : -1;
        if (v == center) CHECK(hat_fine[d] == doctest::Approx(1.0));
    }
    // midpoints of edges touching the center vertex carry 1/2
    int halves = 0;
    for (int d = 0; d < fine->n_dofs(); ++d)
        if (hat_fine[d] == doctest::Approx(0.5)) ++halves;
    CHECK(halves == 6); // center vertex of the 2x2 grid has 6 incident edges
}

TEST_CASE("prolongation of the same space is the identity") {
    MeshPtr m = build_initial_mesh({DomainKind::l_shape, 2});
    FeSpacePtr s = FeSpace::dirichlet(m);
    SparseMatrix p = prolongation(*s, *s);
    CHECK(p.rows() == s->n_dofs());
    CHECK(p.nnz() == s->n_dofs());
    for (int d = 0; d < s->n_dofs(); ++d) CHECK(p.coeff(d, d) == doctest::Approx(1.0));
}

TEST_CASE("prolongation rows: one entry for survivors, half-half for edge midpoints") {
    MeshPtr m = build_initial_mesh({DomainKind::unit_square, 2});
    MeshPtr f = refine_uniform(m);
    FeSpacePtr coarse = FeSpace::dirichlet(m);
    FeSpacePtr fine = FeSpace::dirichlet(f);
    SparseMatrix p = prolongation(*coarse, *fine);

    for (int r = 0; r < p.rows(); ++r) {
        const std::int32_t v = fine->interior_dofs()[r];
        const VertexParent& vp = f->vertex_parents()[v];
        double row_sum = 0.0;
        int entries = 0;
        for (std::int32_t q = p.row_ptr()[r]; q < p.row_ptr()[r + 1]; ++q) {
            row_sum += p.values()[q];
            ++entries;
        }
        if (vp.original()) {
            CHECK(entries == 1);
            CHECK(row_sum == doctest::Approx(1.0));
        } else {
            const bool parent_on_boundary =
                m->vertex_on_boundary(vp.a) || m->vertex_on_boundary(vp.b);
            if (!parent_on_boundary) {
                CHECK(entries == 2);
                CHECK(row_sum == doctest::Approx(1.0));
            }
        }
    }
}

TEST_CASE("prolongation is the exact P1 injection (pointwise and in energy)") {
    MeshPtr m = build_initial_mesh({DomainKind::l_shape, 1});
    FeSpacePtr coarse = FeSpace::dirichlet(m);

    // two uniform plus one adaptive step for a multi-level chain
    MeshPtr f1 = refine_uniform(m);
    MeshPtr f2 = refine_adaptive(f1, {0, 3, 5});
    MeshPtr f3 = refine_uniform(f2);
    FeSpacePtr fine = FeSpace::dirichlet(f3);
    SparseMatrix p = prolongation(*coarse, *fine);

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> c(static_cast<std::size_t>(coarse->n_dofs()));
    for (double& v : c) v = dist(rng);
    const std::vector<double> cf = p.multiply(c);

    // pointwise: evaluate the coarse P1 function at every fine vertex through
    // the embedding (independent barycentric evaluation)
    CellEmbedding emb = nesting_map(m, f3);
    oracle::P1Function coarse_fn{coarse.get(), &c};
    for (int cc = 0; cc < m->n_cells(); ++cc) {
        for (std::int32_t fc : emb.fine_cells_of_coarse[cc]) {
            for (int i = 0; i < 3; ++i) {
                const std::int32_t v = f3->cells()[fc].v[i];
                const double expected = coarse_fn.value(f3->vertices()[v], cc);
                const std::int32_t d = fine->dof_of_vertex(v);
                const double got = d >= 0 ? cf[d] : 0.0;
                CHECK(got == doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }

    // energy identity for the Laplace stiffness
    auto W0 = [](double, double) { return 0.0; };
    SparseMatrix k_coarse = assemble_stiffness_potential(*coarse, W0);
    SparseMatrix k_fine = assemble_stiffness_potential(*fine, W0);
    const double e_coarse = k_coarse.inner(c, c);
    const double e_fine = k_fine.inner(cf, cf);
    CHECK(e_fine == doctest::Approx(e_coarse).epsilon(1e-12));
}

TEST_CASE("prolongation between unrelated meshes fails") {
    FeSpacePtr a = FeSpace::dirichlet(build_initial_mesh({DomainKind::unit_square, 2}));
    FeSpacePtr b = FeSpace::dirichlet(build_initial_mesh({DomainKind::unit_square, 2}));
    CHECK_THROWS_WITH_AS(prolongation(*a, *b), doctest::Contains("not-a-descendant"), Error);
}

} // TEST_SUITE
