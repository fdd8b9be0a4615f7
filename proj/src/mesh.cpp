#include "gpe/mesh.hpp"

#include "gpe/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace gpe {

namespace {

inline std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

inline double dist(const Vec2& p, const Vec2& q) {
    return std::hypot(p.x - q.x, p.y - q.y);
}

inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

/// Rotates the vertex order (orientation-preserving) so the longest edge
/// sits in the refinement slot (v[2], v[0]); ties break on the smaller
/// sorted vertex pair.
Cell canonical_refinement_rotation(const Cell& c, const std::vector<Vec2>& verts) {
    const std::array<Cell, 3> rot = {Cell{{c.v[0], c.v[1], c.v[2]}},
                                     Cell{{c.v[1], c.v[2], c.v[0]}},
                                     Cell{{c.v[2], c.v[0], c.v[1]}}};
    int best = 0;
    double best_len = -1.0;
    std::uint64_t best_tie = ~std::uint64_t{0};
    for (int r = 0; r < 3; ++r) {
        const std::int32_t a = rot[r].v[2], b = rot[r].v[0];
        const double len = dist(verts[a], verts[b]);
        const std::uint64_t tie = edge_key(a, b);
        if (len > best_len + 1e-14 * (1.0 + len) ||
            (std::abs(len - best_len) <= 1e-14 * (1.0 + len) && tie < best_tie)) {
            best = r;
            best_len = len;
            best_tie = tie;
        }
    }
    return rot[best];
}

} // namespace


Mesh::Mesh(Init, std::vector<Vec2> vertices, std::vector<Cell> cells, int level, MeshPtr parent,
           std::vector<std::int32_t> parent_cell, std::vector<VertexParent> vertex_parents)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), level_(level),
      parent_(std::move(parent)), parent_cell_(std::move(parent_cell)),
      vertex_parents_(std::move(vertex_parents)) {
    // boundary facets = edges adjacent to exactly one cell
    std::unordered_map<std::uint64_t, int> edge_count;
    edge_count.reserve(cells_.size() * 3);
    for (const Cell& c : cells_)
        for (int e = 0; e < 3; ++e)
            ++edge_count[edge_key(c.v[e], c.v[(e + 1) % 3])];
    for (const auto& [key, cnt] : edge_count) {
        if (cnt == 1) {
            const auto a = static_cast<std::int32_t>(key >> 32);
            const auto b = static_cast<std::int32_t>(key & 0xffffffffu);
            boundary_facets_.push_back({a, b});
        } else if (cnt > 2) {
            throw Error("non-conforming", "edge shared by more than two cells");
        }
    }
    std::sort(boundary_facets_.begin(), boundary_facets_.end());
    on_boundary_.assign(vertices_.size(), 0);
    for (const auto& f : boundary_facets_) {
        on_boundary_[f[0]] = 1;
        on_boundary_[f[1]] = 1;
    }
}

double Mesh::cell_area(std::int32_t c) const {
    const Cell& t = cells_[c];
    return signed_area(vertices_[t.v[0]], vertices_[t.v[1]], vertices_[t.v[2]]);
}

double Mesh::cell_diameter(std::int32_t c) const {
    const Cell& t = cells_[c];
    double d = 0.0;
    for (int e = 0; e < 3; ++e)
        d = std::max(d, dist(vertices_[t.v[e]], vertices_[t.v[(e + 1) % 3]]));
    return d;
}

double Mesh::max_diameter() const {
    double d = 0.0;
    for (int c = 0; c < n_cells(); ++c) d = std::max(d, cell_diameter(c));
    return d;
}

double Mesh::total_area() const {
    double s = 0.0;
    for (int c = 0; c < n_cells(); ++c) s += cell_area(c);
    return s;
}

MeshPtr build_initial_mesh(const DomainSpec& spec) {
    if (spec.kind == DomainKind::unit_cube)
        throw Error("unsupported-dimension", "3D pipeline is not built");
    if (spec.initial_subdivision < 1)
        throw Error("bad-config", "initial_subdivision must be >= 1");

    // unit squares making up the domain, in grid coordinates
    int units_x = 1, units_y = 1;
    auto in_domain = [&](int ux, int uy) {
        if (spec.kind == DomainKind::unit_square) return ux == 0 && uy == 0;
        return !(ux == 1 && uy == 1); // L-shape: (0,2)^2 minus the upper-right unit square
    };
    if (spec.kind == DomainKind::l_shape) units_x = units_y = 2;

    const int s = spec.initial_subdivision;
    const int nx = units_x * s, ny = units_y * s;
    const double h = 1.0 / s;

    std::vector<Vec2> verts;
    std::vector<std::int32_t> vid(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);
    auto grid = [&](int i, int j) -> std::int32_t& {
        return vid[static_cast<std::size_t>(j) * (nx + 1) + i];
    };
    auto cell_used = [&](int i, int j) { return in_domain(i / s, j / s); };

    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            bool used = false;
            for (int dj = -1; dj <= 0 && !used; ++dj)
                for (int di = -1; di <= 0 && !used; ++di) {
                    const int ci = i + di, cj = j + dj;
                    if (ci >= 0 && ci < nx && cj >= 0 && cj < ny && cell_used(ci, cj)) used = true;
                }
            if (used) {
                grid(i, j) = static_cast<std::int32_t>(verts.size());
                verts.push_back({i * h, j * h});
            }
        }

    // each square split along the lower-left to upper-right diagonal, which is
    // also every triangle's refinement edge
    std::vector<Cell> cells;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (!cell_used(i, j)) continue;
            const std::int32_t ll = grid(i, j), lr = grid(i + 1, j);
            const std::int32_t ul = grid(i, j + 1), ur = grid(i + 1, j + 1);
            cells.push_back({{ll, lr, ur}}); // refinement edge (ur, ll)
            cells.push_back({{ur, ul, ll}}); // refinement edge (ll, ur)
        }

    std::vector<VertexParent> vp(verts.size());
    return std::make_shared<Mesh>(Mesh::Init{}, std::move(verts), std::move(cells), 0, nullptr,
                                  std::vector<std::int32_t>{}, std::move(vp));
}

MeshPtr refine_uniform(const MeshPtr& m) {
    std::vector<Vec2> verts = m->vertices();
    std::vector<VertexParent> vp = m->vertex_parents();
    for (auto& p : vp) p = VertexParent{}; // inherited vertices count as original here

    std::unordered_map<std::uint64_t, std::int32_t> midpoint;
    midpoint.reserve(m->n_cells() * 2);
    auto mid = [&](std::int32_t a, std::int32_t b) {
        const std::uint64_t key = edge_key(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const auto idx = static_cast<std::int32_t>(verts.size());
        verts.push_back({0.5 * (verts[a].x + verts[b].x), 0.5 * (verts[a].y + verts[b].y)});
        vp.push_back({std::min(a, b), std::max(a, b)});
        midpoint.emplace(key, idx);
        return idx;
    };

    std::vector<Cell> cells;
    std::vector<std::int32_t> parent_cell;
    cells.reserve(m->n_cells() * 4);
    parent_cell.reserve(m->n_cells() * 4);
    for (std::int32_t c = 0; c < m->n_cells(); ++c) {
        const Cell& t = m->cells()[c];
        const std::int32_t a = t.v[0], b = t.v[1], d = t.v[2];
        const std::int32_t mab = mid(a, b), mbd = mid(b, d), mda = mid(d, a);
        const std::array<Cell, 4> kids = {Cell{{a, mab, mda}}, Cell{{mab, b, mbd}},
                                          Cell{{mda, mbd, d}}, Cell{{mab, mbd, mda}}};
        for (const Cell& k : kids) {
            cells.push_back(canonical_refinement_rotation(k, verts));
            parent_cell.push_back(c);
        }
    }

    return std::make_shared<Mesh>(Mesh::Init{}, std::move(verts), std::move(cells),
                                  m->level() + 1, m, std::move(parent_cell), std::move(vp));
}

namespace {

/// Mutable scaffold for newest-vertex bisection with conforming closure.
struct BisectionWork {
    std::vector<Vec2> verts;
    std::vector<VertexParent> vp;
    struct WCell {
        Cell c;
        std::int32_t origin; // cell index in the input mesh
        bool alive = true;
    };
    std::vector<WCell> cells;
    // live cells adjacent to each edge (at most 2 in a conforming mesh)
    std::unordered_map<std::uint64_t, std::array<std::int32_t, 2>> edge_cells;

    void link(std::uint64_t key, std::int32_t cell) {
        auto [it, inserted] = edge_cells.try_emplace(key, std::array<std::int32_t, 2>{-1, -1});
        auto& slot = it->second;
        if (slot[0] < 0) slot[0] = cell;
        else if (slot[1] < 0) slot[1] = cell;
        else throw Error("non-conforming", "edge acquired a third cell during bisection");
    }
    void unlink(std::uint64_t key, std::int32_t cell) {
        auto it = edge_cells.find(key);
        if (it == edge_cells.end()) return;
        auto& slot = it->second;
        if (slot[0] == cell) slot[0] = slot[1];
        slot[1] = -1;
        if (slot[0] < 0) edge_cells.erase(it);
    }
    std::int32_t neighbor_across(std::uint64_t key, std::int32_t cell) const {
        auto it = edge_cells.find(key);
        if (it == edge_cells.end()) return -1;
        if (it->second[0] != cell && it->second[0] >= 0) return it->second[0];
        return it->second[1];
    }

    std::int32_t add_cell(const Cell& c, std::int32_t origin) {
        const auto idx = static_cast<std::int32_t>(cells.size());
        cells.push_back({c, origin, true});
        for (int e = 0; e < 3; ++e) link(edge_key(c.v[e], c.v[(e + 1) % 3]), idx);
        return idx;
    }
    void remove_cell(std::int32_t idx) {
        WCell& w = cells[idx];
        w.alive = false;
        for (int e = 0; e < 3; ++e) unlink(edge_key(w.c.v[e], w.c.v[(e + 1) % 3]), idx);
    }

    std::int32_t split_vertex(std::int32_t a, std::int32_t b) {
        const auto idx = static_cast<std::int32_t>(verts.size());
        verts.push_back({0.5 * (verts[a].x + verts[b].x), 0.5 * (verts[a].y + verts[b].y)});
        vp.push_back({std::min(a, b), std::max(a, b)});
        return idx;
    }

    // replaces one live cell by its two bisection children across (v2, v0)
    void bisect_single(std::int32_t idx, std::int32_t m) {
        const Cell c = cells[idx].c;
        const std::int32_t origin = cells[idx].origin;
        remove_cell(idx);
        add_cell({{c.v[1], m, c.v[0]}}, origin);
        add_cell({{c.v[2], m, c.v[1]}}, origin);
    }

    std::uint64_t refinement_key(std::int32_t idx) const {
        const Cell& c = cells[idx].c;
        return edge_key(c.v[2], c.v[0]);
    }

    /// Recursive bisection: makes the refinement-edge neighbor compatible
    /// first, then splits the shared edge once for both cells. Terminates for
    /// meshes whose refinement edges pair up, which the structured fixtures
    /// and their descendants guarantee.
    void bisect(std::int32_t idx, int depth) {
        if (depth > 64) throw Error("non-conforming", "bisection recursion exceeded bound");
        if (!cells[idx].alive) return;
        const std::uint64_t key = refinement_key(idx);
        std::int32_t nb = neighbor_across(key, idx);
        if (nb >= 0 && refinement_key(nb) != key) {
            bisect(nb, depth + 1);
            nb = neighbor_across(key, idx);
            if (nb >= 0 && refinement_key(nb) != key)
                throw Error("non-conforming", "neighbor still incompatible after bisection");
        }
        const Cell c = cells[idx].c;
        const std::int32_t m = split_vertex(c.v[2], c.v[0]);
        bisect_single(idx, m);
        if (nb >= 0) bisect_single(nb, m);
    }
};

} // namespace

MeshPtr refine_adaptive(const MeshPtr& m, const std::vector<std::int32_t>& marked) {
    if (marked.empty()) return m;
    for (std::int32_t c : marked)
        if (c < 0 || c >= m->n_cells())
            throw Error("dimension-mismatch", "marked cell index out of range");

    BisectionWork work;
    work.verts = m->vertices();
    work.vp.assign(work.verts.size(), VertexParent{});
    work.cells.reserve(m->n_cells() * 3);
    work.edge_cells.reserve(m->n_cells() * 3);
    for (std::int32_t c = 0; c < m->n_cells(); ++c) work.add_cell(m->cells()[c], c);

    std::vector<std::int32_t> to_do(marked);
    std::sort(to_do.begin(), to_do.end());
    to_do.erase(std::unique(to_do.begin(), to_do.end()), to_do.end());
    for (std::int32_t c : to_do)
        if (work.cells[c].alive) work.bisect(c, 0);

    std::vector<Cell> cells;
    std::vector<std::int32_t> parent_cell;
    for (const auto& w : work.cells) {
        if (!w.alive) continue;
        cells.push_back(w.c);
        parent_cell.push_back(w.origin);
    }
    return std::make_shared<Mesh>(Mesh::Init{}, std::move(work.verts), std::move(cells),
                                  m->level() + 1, m, std::move(parent_cell), std::move(work.vp));
}

CellEmbedding nesting_map(const MeshPtr& coarse, const MeshPtr& fine) {
    // walk the genealogy chain from fine up to coarse
    std::vector<const Mesh*> chain; // fine ... coarse
    const Mesh* cur = fine.get();
    while (cur && cur != coarse.get()) {
        chain.push_back(cur);
        cur = cur->parent().get();
    }
    if (cur != coarse.get())
        throw Error("not-a-descendant", "fine mesh does not descend from the given coarse mesh");

    CellEmbedding emb;
    emb.fine_cells_of_coarse.assign(coarse->n_cells(), {});
    for (std::int32_t f = 0; f < fine->n_cells(); ++f) {
        std::int32_t c = f;
        for (const Mesh* lev : chain) c = lev->parent_cell()[c];
        emb.fine_cells_of_coarse[c].push_back(f);
    }
    return emb;
}

std::string dump_mesh(const Mesh& m) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "2 %d %d\n", m.n_vertices(), m.n_cells());
    out += buf;
    for (const Vec2& v : m.vertices()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
        out += buf;
    }
    for (const Cell& c : m.cells()) {
        std::snprintf(buf, sizeof buf, "%d %d %d\n", c.v[0], c.v[1], c.v[2]);
        out += buf;
    }
    return out;
}

} // namespace gpe
