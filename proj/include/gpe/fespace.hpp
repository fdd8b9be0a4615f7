#pragma once

#include "gpe/mesh.hpp"
#include "gpe/sparse.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace gpe {

using ScalarField = std::function<double(double, double)>;

/// Symmetric quadrature rule on the reference triangle in barycentric
/// coordinates. Weights are positive and sum to one; the physical integral is
/// cell_area * sum_q w_q f(x_q).
struct QuadRule {
    struct Point {
        double l0, l1, l2;
    };
    std::vector<Point> points;
    std::vector<double> weights;
    int exact_degree = 0;
};

/// Rule exact for all polynomials of the requested degree (the returned rule
/// may carry a higher exactness). Throws "degree-unsupported" outside [1, 6].
const QuadRule& quad_rule(int exact_degree);

class FeSpace;
using FeSpacePtr = std::shared_ptr<const FeSpace>;

/// P1 Lagrange space over a mesh. The Dirichlet flavor eliminates boundary
/// vertices; the unconstrained flavor keeps every vertex as a degree of
/// freedom (used for whole-domain integrals and tests).
class FeSpace {
public:
    static FeSpacePtr dirichlet(MeshPtr m);
    static FeSpacePtr unconstrained(MeshPtr m);

    const Mesh& mesh() const { return *mesh_; }
    const MeshPtr& mesh_ptr() const { return mesh_; }
    int n_total() const { return mesh_->n_vertices(); }
    int n_dofs() const { return static_cast<int>(interior_dofs_.size()); }
    const std::vector<std::int32_t>& interior_dofs() const { return interior_dofs_; }
    /// -1 when the vertex is constrained.
    std::int32_t dof_of_vertex(std::int32_t v) const { return dof_of_vertex_[v]; }
    bool constrains_boundary() const { return constrains_boundary_; }

    struct Init;
    FeSpace(Init, MeshPtr m, bool constrain_boundary);

private:
    MeshPtr mesh_;
    std::vector<std::int32_t> interior_dofs_;
    std::vector<std::int32_t> dof_of_vertex_;
    bool constrains_boundary_ = true;
};

/// Coefficients of a P1 function on a space (interior DOFs only; constrained
/// vertices are implicitly zero).
struct CoeffVec {
    FeSpacePtr space;
    std::vector<double> values;
};

/// Nodal interpolation at interior vertices.
CoeffVec interpolate(const FeSpacePtr& space, const ScalarField& f);

/// Exact injection matrix (n_dofs(fine) x n_dofs(coarse)) between nested
/// spaces. Throws "not-a-descendant" when the meshes are unrelated.
SparseMatrix prolongation(const FeSpace& coarse, const FeSpace& fine);

/// Evaluates the P1 function of a CoeffVec at a mesh vertex.
double value_at_vertex(const CoeffVec& u, std::int32_t vertex);

} // namespace gpe
