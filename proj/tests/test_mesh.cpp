#include "gpe/error.hpp"
#include "gpe/mesh.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

using namespace gpe;

namespace {

/// Conformity + orientation invariants, asserted after every operation.
void check_mesh_valid(const Mesh& m) {
    std::map<std::pair<std::int32_t, std::int32_t>, int> edge_count;
    for (const Cell& c : m.cells()) {
        REQUIRE(m.cell_area(static_cast<std::int32_t>(&c - m.cells().data())) > 0.0);
        for (int e = 0; e < 3; ++e) {
            auto a = c.v[e], b = c.v[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    }
    std::set<std::pair<std::int32_t, std::int32_t>> boundary;
    for (const auto& f : m.boundary_facets()) {
        auto a = f[0], b = f[1];
        if (a > b) std::swap(a, b);
        boundary.insert({a, b});
    }
    for (const auto& [edge, count] : edge_count) {
        REQUIRE(count <= 2);
        CHECK(boundary.count(edge) == (count == 1 ? 1u : 0u));
    }
}

double domain_area(DomainKind k) { return k == DomainKind::l_shape ? 3.0 : 1.0; }

} // namespace

TEST_SUITE("mesh") {

TEST_CASE("unit square fixtures have the expected counts") {
    MeshPtr m1 = build_initial_mesh({DomainKind::unit_square, 1});
    CHECK(m1->n_vertices() == 4);
    CHECK(m1->n_cells() == 2);
    CHECK(m1->boundary_facets().size() == 4);
    check_mesh_valid(*m1);

    MeshPtr m2 = build_initial_mesh({DomainKind::unit_square, 2});
    CHECK(m2->n_vertices() == 9);
    CHECK(m2->n_cells() == 8);
    check_mesh_valid(*m2);
}

TEST_CASE("l-shape fixture covers three unit squares") {
    MeshPtr m = build_initial_mesh({DomainKind::l_shape, 1});
    CHECK(m->n_vertices() == 8);
    CHECK(m->n_cells() == 6);
    CHECK(m->total_area() == doctest::Approx(3.0).epsilon(1e-14));
    check_mesh_valid(*m);
}

TEST_CASE("the 3D domain is rejected") {
    CHECK_THROWS_WITH_AS(build_initial_mesh({DomainKind::unit_cube, 1}),
                         doctest::Contains("unsupported-dimension"), Error);
}

TEST_CASE("uniform refinement quadruples cells and halves diameters") {
    MeshPtr m = build_initial_mesh({DomainKind::unit_square, 1});
    MeshPtr r = refine_uniform(m);
    CHECK(r->n_vertices() == 9);
    CHECK(r->n_cells() == 8);
    CHECK(r->max_diameter() == doctest::Approx(0.5 * m->max_diameter()).epsilon(1e-14));
    check_mesh_valid(*r);

    MeshPtr rr = refine_uniform(r);
    CHECK(rr->n_vertices() == 25);
    CHECK(rr->n_cells() == 32);
    CHECK(rr->max_diameter() == doctest::Approx(0.25 * m->max_diameter()).epsilon(1e-14));
    check_mesh_valid(*rr);

    CHECK(rr->total_area() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("refinement keeps ancestor vertices in place") {
    MeshPtr m = build_initial_mesh({DomainKind::l_shape, 2});
    MeshPtr f = refine_uniform(refine_uniform(m));
    for (int v = 0; v < m->n_vertices(); ++v) {
        CHECK(f->vertices()[v].x == m->vertices()[v].x);
        CHECK(f->vertices()[v].y == m->vertices()[v].y);
    }
}

TEST_CASE("genealogy tiles every parent cell") {
    MeshPtr m = build_initial_mesh({DomainKind::unit_square, 2});
    MeshPtr f = refine_uniform(m);
    std::vector<double> child_area(m->n_cells(), 0.0);
    for (int c = 0; c < f->n_cells(); ++c) child_area[f->parent_cell()[c]] += f->cell_area(c);
    for (int c = 0; c < m->n_cells(); ++c)
        CHECK(child_area[c] == doctest::Approx(m->cell_area(c)).epsilon(1e-12));
}

TEST_CASE("empty marking returns the identical mesh") {
    MeshPtr m = build_initial_mesh({DomainKind::unit_square, 2});
    MeshPtr r = refine_adaptive(m, {});
    CHECK(r.get() == m.get());
}

TEST_CASE("single marked triangle bisects with conforming closure") {
    MeshPtr m = build_initial_mesh({DomainKind::unit_square, 1});
    MeshPtr r = refine_adaptive(m, {0});
    // the shared refinement edge splits both triangles at once
    CHECK(r->n_cells() == 4);
    CHECK(r->n_vertices() == 5);
    CHECK(r->total_area() == doctest::Approx(1.0).epsilon(1e-14));
    check_mesh_valid(*r);
}

TEST_CASE("marking everything bisects everything") {
    MeshPtr m = build_initial_mesh({DomainKind::l_shape, 1});
    std::vector<std::int32_t> all(m->n_cells());
    for (int c = 0; c < m->n_cells(); ++c) all[c] = c;
    MeshPtr r = refine_adaptive(m, all);
    check_mesh_valid(*r);
    CHECK(r->n_cells() >= 2 * m->n_cells());
    std::vector<int> children(m->n_cells(), 0);
    for (int c = 0; c < r->n_cells(); ++c) ++children[r->parent_cell()[c]];
    for (int c = 0; c < m->n_cells(); ++c) CHECK(children[c] >= 2);
    CHECK(r->total_area() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("repeated adaptive refinement stays conforming") {
    MeshPtr m = build_initial_mesh({DomainKind::l_shape, 1});
    // keep refining near the reentrant corner
    for (int round = 0; round < 6; ++round) {
        std::vector<std::int32_t> marked;
        for (int c = 0; c < m->n_cells(); ++c) {
            const Cell& t = m->cells()[c];
            for (int i = 0; i < 3; ++i) {
                const Vec2& p = m->vertices()[t.v[i]];
                if (std::hypot(p.x - 1.0, p.y - 1.0) < 0.5) {
                    marked.push_back(c);
                    break;
                }
            }
        }
        m = refine_adaptive(m, marked);
        check_mesh_valid(*m);
        CHECK(m->total_area() == doctest::Approx(domain_area(DomainKind::l_shape)).epsilon(1e-12));
    }
    CHECK(m->level() == 6);
}

TEST_CASE("nesting map: identity, one and two refinements") {
    MeshPtr m = build_initial_mesh({DomainKind::unit_square, 2});

    CellEmbedding self = nesting_map(m, m);
    for (int c = 0; c < m->n_cells(); ++c) {
        REQUIRE(self.fine_cells_of_coarse[c].size() == 1);
        CHECK(self.fine_cells_of_coarse[c][0] == c);
    }

    MeshPtr f1 = refine_uniform(m);
    CellEmbedding e1 = nesting_map(m, f1);
    for (int c = 0; c < m->n_cells(); ++c) CHECK(e1.fine_cells_of_coarse[c].size() == 4);

    MeshPtr f2 = refine_uniform(f1);
    CellEmbedding e2 = nesting_map(m, f2);
    for (int c = 0; c < m->n_cells(); ++c) {
        CHECK(e2.fine_cells_of_coarse[c].size() == 16);
        double area = 0.0;
        for (std::int32_t fc : e2.fine_cells_of_coarse[c]) area += f2->cell_area(fc);
        CHECK(area == doctest::Approx(m->cell_area(c)).epsilon(1e-12));
    }
}

TEST_CASE("nesting map rejects unrelated meshes") {
    MeshPtr a = build_initial_mesh({DomainKind::unit_square, 1});
    MeshPtr b = build_initial_mesh({DomainKind::unit_square, 1});
    CHECK_THROWS_WITH_AS(nesting_map(a, b), doctest::Contains("not-a-descendant"), Error);
    // descending the wrong way round fails too
    MeshPtr f = refine_uniform(a);
    CHECK_THROWS_AS(nesting_map(f, a), Error);
}

TEST_CASE("mesh dump round-trips counts and 17-digit coordinates") {
    MeshPtr m = build_initial_mesh({DomainKind::unit_square, 1});
    const std::string text = dump_mesh(*m);
    std::istringstream in(text);
    int d, nv, nc;
    in >> d >> nv >> nc;
    CHECK(d == 2);
    CHECK(nv == 4);
    CHECK(nc == 2);
    for (int v = 0; v < nv; ++v) {
        double x, y;
        in >> x >> y;
        CHECK(x == m->vertices()[v].x);
        CHECK(y == m->vertices()[v].y);
    }
}

} // TEST_SUITE
