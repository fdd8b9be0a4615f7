#include "gpe/fespace.hpp"

#include "gpe/error.hpp"

#include <algorithm>
#include <cmath>

namespace gpe {

namespace {

void push_sym3(QuadRule& r, double a, double b, double w) {
    // the three cyclic placements of (a, b, b); a == b collapses to the centroid
    if (std::abs(a - b) < 1e-15) {
        r.points.push_back({a, b, b});
        r.weights.push_back(w);
        return;
    }
    r.points.push_back({a, b, b});
    r.points.push_back({b, a, b});
    r.points.push_back({b, b, a});
    r.weights.insert(r.weights.end(), 3, w);
}

void push_sym6(QuadRule& r, double a, double b, double c, double w) {
    const double p[6][3] = {{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}};
    for (auto& q : p) {
        r.points.push_back({q[0], q[1], q[2]});
        r.weights.push_back(w);
    }
}

QuadRule make_rule(int degree) {
    QuadRule r;
    switch (degree) {
    case 1:
        push_sym3(r, 1.0 / 3.0, 1.0 / 3.0, 1.0);
        r.exact_degree = 1;
        break;
    case 2:
        push_sym3(r, 0.0, 0.5, 1.0 / 3.0); // edge midpoints
        r.exact_degree = 2;
        break;
    case 4:
        push_sym3(r, 0.1081030181680702, 0.4459484909159649, 0.2233815896780115);
        push_sym3(r, 0.8168475729804585, 0.0915762135097707, 0.1099517436553219);
        r.exact_degree = 4;
        break;
    case 5: {
        const double s15 = std::sqrt(15.0);
        push_sym3(r, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0);
        push_sym3(r, (9.0 + 2.0 * s15) / 21.0, (6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
        push_sym3(r, (9.0 - 2.0 * s15) / 21.0, (6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
        r.exact_degree = 5;
        break;
    }
    case 6:
        push_sym3(r, 0.8738219710169960, 0.0630890144915022, 0.0508449063702068);
        push_sym3(r, 0.5014265096581790, 0.2492867451709104, 0.1167862757263794);
        push_sym6(r, 0.6365024991213987, 0.3103524510337844, 0.0531450498448169,
                  0.0828510756183736);
        r.exact_degree = 6;
        break;
    default:
        break;
    }
    return r;
}

} // namespace

const QuadRule& quad_rule(int exact_degree) {
    if (exact_degree < 1 || exact_degree > 6)
        throw Error("degree-unsupported", "quadrature degree must be in [1, 6]");
    static const QuadRule rules[] = {make_rule(1), make_rule(2), make_rule(4),
                                     make_rule(4), make_rule(5), make_rule(6)};
    return rules[exact_degree - 1];
}

struct FeSpace::Init {};

FeSpace::FeSpace(Init, MeshPtr m, bool constrain_boundary)
    : mesh_(std::move(m)), constrains_boundary_(constrain_boundary) {
    const int nv = mesh_->n_vertices();
    dof_of_vertex_.assign(nv, -1);
    interior_dofs_.reserve(nv);
    for (std::int32_t v = 0; v < nv; ++v) {
        if (constrain_boundary && mesh_->vertex_on_boundary(v)) continue;
        dof_of_vertex_[v] = static_cast<std::int32_t>(interior_dofs_.size());
        interior_dofs_.push_back(v);
    }
}

FeSpacePtr FeSpace::dirichlet(MeshPtr m) {
    return std::make_shared<FeSpace>(Init{}, std::move(m), true);
}

FeSpacePtr FeSpace::unconstrained(MeshPtr m) {
    return std::make_shared<FeSpace>(Init{}, std::move(m), false);
}

CoeffVec interpolate(const FeSpacePtr& space, const ScalarField& f) {
    CoeffVec u{space, std::vector<double>(static_cast<std::size_t>(space->n_dofs()), 0.0)};
    for (int d = 0; d < space->n_dofs(); ++d) {
        const Vec2& p = space->mesh().vertices()[space->interior_dofs()[d]];
        u.values[d] = f(p.x, p.y);
    }
    return u;
}

double value_at_vertex(const CoeffVec& u, std::int32_t vertex) {
    const std::int32_t d = u.space->dof_of_vertex(vertex);
    return d >= 0 ? u.values[d] : 0.0;
}

SparseMatrix prolongation(const FeSpace& coarse, const FeSpace& fine) {
    // genealogy chain fine -> coarse
    std::vector<const Mesh*> chain;
    const Mesh* cur = &fine.mesh();
    while (cur && cur != &coarse.mesh()) {
        chain.push_back(cur);
        cur = cur->parent().get();
    }
    if (cur != &coarse.mesh())
        throw Error("not-a-descendant", "fine space does not descend from coarse space");
    std::reverse(chain.begin(), chain.end()); // coarse-to-fine steps

    // rows over coarse vertices for each vertex of the current mesh
    using Row = std::vector<std::pair<std::int32_t, double>>;
    std::vector<Row> rows(static_cast<std::size_t>(coarse.mesh().n_vertices()));
    for (std::int32_t v = 0; v < coarse.mesh().n_vertices(); ++v) rows[v] = {{v, 1.0}};

    for (const Mesh* step : chain) {
        rows.resize(static_cast<std::size_t>(step->n_vertices()));
        for (std::int32_t v = 0; v < step->n_vertices(); ++v) {
            const VertexParent& p = step->vertex_parents()[v];
            if (p.original()) continue; // inherited vertex keeps its row
            Row merged;
            merged.reserve(rows[p.a].size() + rows[p.b].size());
            std::size_t ia = 0, ib = 0;
            const Row& ra = rows[p.a];
            const Row& rb = rows[p.b];
            while (ia < ra.size() || ib < rb.size()) {
                if (ib >= rb.size() || (ia < ra.size() && ra[ia].first < rb[ib].first)) {
                    merged.emplace_back(ra[ia].first, 0.5 * ra[ia].second);
                    ++ia;
                } else if (ia >= ra.size() || rb[ib].first < ra[ia].first) {
                    merged.emplace_back(rb[ib].first, 0.5 * rb[ib].second);
                    ++ib;
                } else {
                    merged.emplace_back(ra[ia].first, 0.5 * (ra[ia].second + rb[ib].second));
                    ++ia;
                    ++ib;
                }
            }
            rows[v] = std::move(merged);
        }
    }

    std::vector<SparseMatrix::Triplet> t;
    for (int r = 0; r < fine.n_dofs(); ++r) {
        const std::int32_t v = fine.interior_dofs()[r];
        for (const auto& [cv, w] : rows[v]) {
            const std::int32_t c = coarse.dof_of_vertex(cv);
            if (c >= 0 && w != 0.0) t.push_back({r, c, w});
        }
    }
    return SparseMatrix::from_triplets(fine.n_dofs(), coarse.n_dofs(), std::move(t));
}

} // namespace gpe
