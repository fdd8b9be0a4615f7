#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace gpe {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

enum class DomainKind { unit_square, l_shape, unit_cube };

struct DomainSpec {
    DomainKind kind = DomainKind::unit_square;
    int initial_subdivision = 1; // cells per unit side
};

/// Triangle as three vertex indices, counterclockwise. The refinement edge
/// for newest-vertex bisection is (v[2], v[0]); v[1] plays the peak role, so
/// bisection children (v[1], m, v[0]) and (v[2], m, v[1]) automatically get
/// the parent's remaining edges as their refinement edges.
struct Cell {
    std::array<std::int32_t, 3> v;
};

/// For vertices created by refinement, the two endpoints (same-mesh indices,
/// both strictly smaller than the new vertex index) of the edge they bisect.
/// Vertices inherited from the parent mesh report original() == true.
struct VertexParent {
    std::int32_t a = -1;
    std::int32_t b = -1;
    bool original() const { return a < 0; }
};

class Mesh;
using MeshPtr = std::shared_ptr<const Mesh>;

/// Immutable conforming triangulation with refinement genealogy. Refinement
/// keeps the parent's vertices as a prefix with unchanged indices, so every
/// ancestor vertex has the same index in every descendant.
class Mesh {
public:
    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<std::array<std::int32_t, 2>>& boundary_facets() const {
        return boundary_facets_;
    }
    int level() const { return level_; }
    MeshPtr parent() const { return parent_; }
    /// Per-cell index into parent()->cells(); empty at level 0.
    const std::vector<std::int32_t>& parent_cell() const { return parent_cell_; }
    const std::vector<VertexParent>& vertex_parents() const { return vertex_parents_; }

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_cells() const { return static_cast<int>(cells_.size()); }
    bool vertex_on_boundary(std::int32_t v) const { return on_boundary_[v] != 0; }

    double cell_area(std::int32_t c) const;     // signed, positive for CCW cells
    double cell_diameter(std::int32_t c) const; // longest edge
    double max_diameter() const;
    double total_area() const;

    struct Init {}; // construction tag; boundary facets are derived internally
    Mesh(Init, std::vector<Vec2> vertices, std::vector<Cell> cells, int level, MeshPtr parent,
         std::vector<std::int32_t> parent_cell, std::vector<VertexParent> vertex_parents);

private:
    std::vector<Vec2> vertices_;
    std::vector<Cell> cells_;
    std::vector<std::array<std::int32_t, 2>> boundary_facets_;
    int level_ = 0;
    MeshPtr parent_;
    std::vector<std::int32_t> parent_cell_;
    std::vector<VertexParent> vertex_parents_;
    std::vector<char> on_boundary_;
};

MeshPtr build_initial_mesh(const DomainSpec& spec);
MeshPtr refine_uniform(const MeshPtr& m);
/// Bisects the marked cells plus whatever closure needs; an empty marking
/// returns the input mesh unchanged.
MeshPtr refine_adaptive(const MeshPtr& m, const std::vector<std::int32_t>& marked);

/// For each coarse cell, the fine cells covering it.
struct CellEmbedding {
    std::vector<std::vector<std::int32_t>> fine_cells_of_coarse;
};
CellEmbedding nesting_map(const MeshPtr& coarse, const MeshPtr& fine);

/// Plain-text dump: "d nv nc", nv coordinate lines, nc cell lines
/// (0-based indices), 17 significant digits.
std::string dump_mesh(const Mesh& m);

} // namespace gpe
