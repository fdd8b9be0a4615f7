#include "gpe/assemble.hpp"

#include "gpe/error.hpp"
#include "gpe/kernels.hpp"
#include "gpe/util.hpp"

#include <array>
#include <cmath>

namespace gpe {

namespace {

struct CellGeom {
    std::array<Vec2, 3> p;
    std::array<Vec2, 3> grad; // gradients of the P1 basis on this cell
    double area;
};

CellGeom cell_geom(const Mesh& m, std::int32_t c) {
    CellGeom g;
    const Cell& t = m.cells()[c];
    for (int i = 0; i < 3; ++i) g.p[i] = m.vertices()[t.v[i]];
    const double det = (g.p[1].x - g.p[0].x) * (g.p[2].y - g.p[0].y) -
                       (g.p[2].x - g.p[0].x) * (g.p[1].y - g.p[0].y);
    g.area = 0.5 * det;
    const double d2 = m.cell_diameter(c) * m.cell_diameter(c);
    if (!(g.area > 1e-14 * d2)) throw Error("singular-geometry", "degenerate cell");
    g.grad[1] = {(g.p[2].y - g.p[0].y) / det, -(g.p[2].x - g.p[0].x) / det};
    g.grad[2] = {-(g.p[1].y - g.p[0].y) / det, (g.p[1].x - g.p[0].x) / det};
    g.grad[0] = {-g.grad[1].x - g.grad[2].x, -g.grad[1].y - g.grad[2].y};
    return g;
}

inline Vec2 quad_point(const CellGeom& g, const QuadRule::Point& q) {
    return {q.l0 * g.p[0].x + q.l1 * g.p[1].x + q.l2 * g.p[2].x,
            q.l0 * g.p[0].y + q.l1 * g.p[1].y + q.l2 * g.p[2].y};
}

/// Barycentric frame of a coarse cell for evaluating its basis at physical
/// points of descendant cells.
struct CoarseFrame {
    Vec2 p0;
    double inv[2][2];
    std::array<std::int32_t, 3> dof; // coarse DOFs (-1 when constrained)
    std::array<Vec2, 3> grad;

    std::array<double, 3> bary(const Vec2& x) const {
        const double dx = x.x - p0.x, dy = x.y - p0.y;
        const double l1 = inv[0][0] * dx + inv[0][1] * dy;
        const double l2 = inv[1][0] * dx + inv[1][1] * dy;
        return {1.0 - l1 - l2, l1, l2};
    }
};

CoarseFrame coarse_frame(const FeSpace& coarse, std::int32_t c) {
    const Mesh& m = coarse.mesh();
    const CellGeom g = cell_geom(m, c);
    CoarseFrame f;
    f.p0 = g.p[0];
    const double det = 2.0 * g.area;
    f.inv[0][0] = (g.p[2].y - g.p[0].y) / det;
    f.inv[0][1] = -(g.p[2].x - g.p[0].x) / det;
    f.inv[1][0] = -(g.p[1].y - g.p[0].y) / det;
    f.inv[1][1] = (g.p[1].x - g.p[0].x) / det;
    f.grad = g.grad;
    for (int i = 0; i < 3; ++i) f.dof[i] = coarse.dof_of_vertex(m.cells()[c].v[i]);
    return f;
}

std::array<double, 3> nodal_values(const FeSpace& s, const CoeffVec& u, std::int32_t c) {
    std::array<double, 3> n{};
    for (int i = 0; i < 3; ++i) {
        const std::int32_t d = s.dof_of_vertex(s.mesh().cells()[c].v[i]);
        n[i] = d >= 0 ? u.values[d] : 0.0;
    }
    return n;
}

constexpr std::size_t kAssemblyChunk = 512;

} // namespace

SparseMatrix assemble_stiffness_potential(const FeSpace& s, const ScalarField& W) {
    const Mesh& m = s.mesh();
    const QuadRule& rule = quad_rule(4);
    const int n = s.n_dofs();

    std::vector<std::vector<SparseMatrix::Triplet>> chunk_out(
        (m.n_cells() + kAssemblyChunk - 1) / kAssemblyChunk);
    parallel_chunks(m.n_cells(), kAssemblyChunk, [&](std::size_t ci, std::size_t lo, std::size_t hi) {
        auto& out = chunk_out[ci];
        for (std::size_t c = lo; c < hi; ++c) {
            const CellGeom g = cell_geom(m, static_cast<std::int32_t>(c));
            std::array<std::int32_t, 3> dof;
            for (int i = 0; i < 3; ++i)
                dof[i] = s.dof_of_vertex(m.cells()[c].v[i]);

            double loc[3][3];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    loc[i][j] = g.area * (g.grad[i].x * g.grad[j].x + g.grad[i].y * g.grad[j].y);

            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const Vec2 x = quad_point(g, rule.points[q]);
                const double wq = g.area * rule.weights[q] * W(x.x, x.y);
                if (wq == 0.0) continue;
                const double l[3] = {rule.points[q].l0, rule.points[q].l1, rule.points[q].l2};
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) loc[i][j] += wq * l[i] * l[j];
            }
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    if (dof[i] >= 0 && dof[j] >= 0) out.push_back({dof[i], dof[j], loc[i][j]});
        }
    });

    std::vector<SparseMatrix::Triplet> t;
    for (auto& c : chunk_out) t.insert(t.end(), c.begin(), c.end());
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix assemble_mass(const FeSpace& s) {
    const Mesh& m = s.mesh();
    const int n = s.n_dofs();
    std::vector<SparseMatrix::Triplet> t;
    t.reserve(static_cast<std::size_t>(m.n_cells()) * 9);
    for (std::int32_t c = 0; c < m.n_cells(); ++c) {
        const CellGeom g = cell_geom(m, c);
        std::array<std::int32_t, 3> dof;
        for (int i = 0; i < 3; ++i) dof[i] = s.dof_of_vertex(m.cells()[c].v[i]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (dof[i] >= 0 && dof[j] >= 0)
                    t.push_back({dof[i], dof[j], g.area / 12.0 * (i == j ? 2.0 : 1.0)});
    }
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix assemble_weighted_mass(const FeSpace& s, const CoeffVec& rho, double zeta) {
    if (rho.space.get() != &s || static_cast<int>(rho.values.size()) != s.n_dofs())
        throw Error("dimension-mismatch", "density does not live on the target space");
    const Mesh& m = s.mesh();
    const QuadRule& rule = quad_rule(4);
    const int n = s.n_dofs();

    std::vector<SparseMatrix::Triplet> t;
    if (zeta != 0.0) {
        t.reserve(static_cast<std::size_t>(m.n_cells()) * 9);
        for (std::int32_t c = 0; c < m.n_cells(); ++c) {
            const CellGeom g = cell_geom(m, c);
            const std::array<double, 3> nv = nodal_values(s, rho, c);
            std::array<std::int32_t, 3> dof;
            for (int i = 0; i < 3; ++i) dof[i] = s.dof_of_vertex(m.cells()[c].v[i]);

            double loc[3][3] = {};
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const double l[3] = {rule.points[q].l0, rule.points[q].l1, rule.points[q].l2};
                const double r = nv[0] * l[0] + nv[1] * l[1] + nv[2] * l[2];
                const double wq = g.area * rule.weights[q] * zeta * r * r;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) loc[i][j] += wq * l[i] * l[j];
            }
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    if (dof[i] >= 0 && dof[j] >= 0) t.push_back({dof[i], dof[j], loc[i][j]});
        }
    }
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseTensor3 assemble_tensor(const FeSpace& coarse, const FeSpace& fine, const CoeffVec& u_tilde,
                              double zeta) {
    const CellEmbedding emb = nesting_map(coarse.mesh_ptr(), fine.mesh_ptr());
    const QuadRule& rule = quad_rule(4);
    std::vector<SparseTensor3::Entry> raw;

    for (std::int32_t cc = 0; cc < coarse.mesh().n_cells(); ++cc) {
        const CoarseFrame frame = coarse_frame(coarse, cc);
        for (std::int32_t fc : emb.fine_cells_of_coarse[cc]) {
            const CellGeom g = cell_geom(fine.mesh(), fc);
            const std::array<double, 3> ut = nodal_values(fine, u_tilde, fc);
            double acc[3][3][3] = {};
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const double lf[3] = {rule.points[q].l0, rule.points[q].l1, rule.points[q].l2};
                const double u = ut[0] * lf[0] + ut[1] * lf[1] + ut[2] * lf[2];
                if (u == 0.0) continue;
                const std::array<double, 3> lc = frame.bary(quad_point(g, rule.points[q]));
                const double wq = g.area * rule.weights[q] * zeta * u;
                for (int i = 0; i < 3; ++i)
                    for (int j = i; j < 3; ++j)
                        for (int k = j; k < 3; ++k)
                            acc[i][j][k] += wq * lc[i] * lc[j] * lc[k];
            }
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j)
                    for (int k = j; k < 3; ++k) {
                        if (acc[i][j][k] == 0.0) continue;
                        const std::int32_t di = frame.dof[i], dj = frame.dof[j], dk = frame.dof[k];
                        if (di >= 0 && dj >= 0 && dk >= 0)
                            raw.push_back({di, dj, dk, acc[i][j][k]});
                    }
        }
    }
    return SparseTensor3::from_entries(coarse.n_dofs(), std::move(raw));
}

BorderStatics assemble_border_statics(const FeSpacePtr& coarse, const FeSpacePtr& fine,
                                      const CoeffVec& u_tilde, const ScalarField& W, double zeta,
                                      bool build_tensor) {
    if (u_tilde.space.get() != fine.get())
        throw Error("dimension-mismatch", "u_tilde must live on the fine space");

    BorderStatics st;
    st.coarse = coarse;
    st.fine = fine;
    st.zeta = zeta;
    st.u_tilde = u_tilde;
    st.embedding = nesting_map(coarse->mesh_ptr(), fine->mesh_ptr());
    st.A_H1 = assemble_stiffness_potential(*coarse, W);
    st.M_H = assemble_mass(*coarse);
    st.prolong = prolongation(*coarse, *fine);

    const int n = coarse->n_dofs();
    const QuadRule& rule = quad_rule(4);
    st.b_Hh1.assign(n, 0.0);
    st.b_Hh23.assign(n, 0.0);
    st.c_Hh.assign(n, 0.0);

    std::vector<SparseMatrix::Triplet> t23;
    std::vector<SparseTensor3::Entry> raw_tensor;

    for (std::int32_t cc = 0; cc < coarse->mesh().n_cells(); ++cc) {
        const CoarseFrame frame = coarse_frame(*coarse, cc);
        for (std::int32_t fc : st.embedding.fine_cells_of_coarse[cc]) {
            const CellGeom g = cell_geom(fine->mesh(), fc);
            const std::array<double, 3> ut = nodal_values(*fine, u_tilde, fc);
            const Vec2 grad_u = {ut[0] * g.grad[0].x + ut[1] * g.grad[1].x + ut[2] * g.grad[2].x,
                                 ut[0] * g.grad[0].y + ut[1] * g.grad[1].y + ut[2] * g.grad[2].y};

            double a23[3][3] = {};
            double acc_t[3][3][3] = {};
            double b1[3] = {}, b23[3] = {}, ch[3] = {};

            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const double lf[3] = {rule.points[q].l0, rule.points[q].l1, rule.points[q].l2};
                const double u = ut[0] * lf[0] + ut[1] * lf[1] + ut[2] * lf[2];
                const Vec2 x = quad_point(g, rule.points[q]);
                const std::array<double, 3> lc = frame.bary(x);
                const double w = g.area * rule.weights[q];
                const double wpot = w * W(x.x, x.y);

                st.d1 += w * (grad_u.x * grad_u.x + grad_u.y * grad_u.y) + wpot * u * u;
                st.xi_h += w * zeta * u * u * u * u;
                st.gamma += w * u * u;

                for (int i = 0; i < 3; ++i) {
                    b1[i] += w * (grad_u.x * frame.grad[i].x + grad_u.y * frame.grad[i].y) +
                             wpot * u * lc[i];
                    b23[i] += w * zeta * u * u * u * lc[i];
                    ch[i] += w * u * lc[i];
                    for (int j = 0; j < 3; ++j) a23[i][j] += w * zeta * u * u * lc[i] * lc[j];
                }
                if (build_tensor && zeta != 0.0 && u != 0.0) {
                    const double wu = w * zeta * u;
                    for (int i = 0; i < 3; ++i)
                        for (int j = i; j < 3; ++j)
                            for (int k = j; k < 3; ++k)
                                acc_t[i][j][k] += wu * lc[i] * lc[j] * lc[k];
                }
            }

            for (int i = 0; i < 3; ++i) {
                const std::int32_t di = frame.dof[i];
                if (di < 0) continue;
                st.b_Hh1[di] += b1[i];
                st.b_Hh23[di] += b23[i];
                st.c_Hh[di] += ch[i];
                for (int j = 0; j < 3; ++j)
                    if (frame.dof[j] >= 0) t23.push_back({di, frame.dof[j], a23[i][j]});
            }
            if (build_tensor && zeta != 0.0) {
                for (int i = 0; i < 3; ++i)
                    for (int j = i; j < 3; ++j)
                        for (int k = j; k < 3; ++k) {
                            if (acc_t[i][j][k] == 0.0) continue;
                            const std::int32_t di = frame.dof[i], dj = frame.dof[j],
                                               dk = frame.dof[k];
                            if (di >= 0 && dj >= 0 && dk >= 0)
                                raw_tensor.push_back({di, dj, dk, acc_t[i][j][k]});
                        }
            }
        }
    }

    st.A_H23 = SparseMatrix::from_triplets(n, n, std::move(t23));
    if (build_tensor) {
        st.T_H = SparseTensor3::from_entries(n, std::move(raw_tensor));
        st.has_tensor = true;
    }
    return st;
}

DynamicBlocks assemble_dynamic_fine(const BorderStatics& st, const std::vector<double>& u_H,
                                    double alpha) {
    const FeSpace& coarse = *st.coarse;
    const FeSpace& fine = *st.fine;
    if (static_cast<int>(u_H.size()) != coarse.n_dofs())
        throw Error("dimension-mismatch", "coarse iterate length");

    const QuadRule& rule = quad_rule(4);
    const int n = coarse.n_dofs();
    DynamicBlocks out;
    out.b_Hh2.assign(n, 0.0);
    std::vector<SparseMatrix::Triplet> t;
    t.reserve(static_cast<std::size_t>(fine.mesh().n_cells()) * 9);

    // fresh pass over every fine cell: this is the nonlinearity-dependent
    // per-iteration cost the tensor route avoids
    for (std::int32_t cc = 0; cc < coarse.mesh().n_cells(); ++cc) {
        const CoarseFrame frame = coarse_frame(coarse, cc);
        const double uh_nodal[3] = {frame.dof[0] >= 0 ? u_H[frame.dof[0]] : 0.0,
                                    frame.dof[1] >= 0 ? u_H[frame.dof[1]] : 0.0,
                                    frame.dof[2] >= 0 ? u_H[frame.dof[2]] : 0.0};
        for (std::int32_t fc : st.embedding.fine_cells_of_coarse[cc]) {
            const CellGeom g = cell_geom(fine.mesh(), fc);
            const std::array<double, 3> ut = nodal_values(fine, st.u_tilde, fc);
            double a2[3][3] = {};
            double b2[3] = {};
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const double lf[3] = {rule.points[q].l0, rule.points[q].l1, rule.points[q].l2};
                const double u_fine = ut[0] * lf[0] + ut[1] * lf[1] + ut[2] * lf[2];
                const std::array<double, 3> lc = frame.bary(quad_point(g, rule.points[q]));
                const double u_coarse = uh_nodal[0] * lc[0] + uh_nodal[1] * lc[1] +
                                        uh_nodal[2] * lc[2];
                const double rho = u_coarse + alpha * u_fine;
                const double wq = g.area * rule.weights[q] * st.zeta * rho * rho;
                out.d2 += wq * u_fine * u_fine;
                for (int i = 0; i < 3; ++i) {
                    b2[i] += wq * u_fine * lc[i];
                    for (int j = 0; j < 3; ++j) a2[i][j] += wq * lc[i] * lc[j];
                }
            }
            for (int i = 0; i < 3; ++i) {
                const std::int32_t di = frame.dof[i];
                if (di < 0) continue;
                out.b_Hh2[di] += b2[i];
                for (int j = 0; j < 3; ++j)
                    if (frame.dof[j] >= 0) t.push_back({di, frame.dof[j], a2[i][j]});
            }
        }
    }
    out.A_H2 = SparseMatrix::from_triplets(n, n, std::move(t));
    return out;
}

} // namespace gpe
