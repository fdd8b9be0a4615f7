#include "gpe/adapt.hpp"

#include "gpe/error.hpp"
#include "gpe/util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace gpe {

EstimatorField estimate(const FeSpace& space, const Eigenpair& pair, const ScalarField& W,
                        double zeta) {
    const Mesh& m = space.mesh();
    const QuadRule& rule = quad_rule(6);
    EstimatorField est;
    est.eta_sq.assign(m.n_cells(), 0.0);

    // per-cell gradients and volume residuals
    std::vector<Vec2> grad(static_cast<std::size_t>(m.n_cells()));
    for (std::int32_t c = 0; c < m.n_cells(); ++c) {
        const Cell& t = m.cells()[c];
        const Vec2 p0 = m.vertices()[t.v[0]], p1 = m.vertices()[t.v[1]], p2 = m.vertices()[t.v[2]];
        const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
        const double area = 0.5 * det;
        const Vec2 g1 = {(p2.y - p0.y) / det, -(p2.x - p0.x) / det};
        const Vec2 g2 = {-(p1.y - p0.y) / det, (p1.x - p0.x) / det};
        const Vec2 g0 = {-g1.x - g2.x, -g1.y - g2.y};
        double nv[3];
        for (int i = 0; i < 3; ++i) {
            const std::int32_t d = space.dof_of_vertex(t.v[i]);
            nv[i] = d >= 0 ? pair.coeffs.values[d] : 0.0;
        }
        grad[c] = {nv[0] * g0.x + nv[1] * g1.x + nv[2] * g2.x,
                   nv[0] * g0.y + nv[1] * g1.y + nv[2] * g2.y};

        double r2 = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double l[3] = {rule.points[q].l0, rule.points[q].l1, rule.points[q].l2};
            const double u = nv[0] * l[0] + nv[1] * l[1] + nv[2] * l[2];
            const Vec2 x = {l[0] * p0.x + l[1] * p1.x + l[2] * p2.x,
                            l[0] * p0.y + l[1] * p1.y + l[2] * p2.y};
            const double r = pair.lambda * u - W(x.x, x.y) * u - zeta * u * u * u;
            r2 += rule.weights[q] * r * r;
        }
        const double hk = m.cell_diameter(c);
        est.eta_sq[c] += hk * hk * area * r2;
    }

    // gradient jumps across interior edges, charged to both cells
    std::unordered_map<std::uint64_t, std::array<std::int32_t, 2>> edge_cells;
    edge_cells.reserve(m.n_cells() * 2);
    auto key_of = [](std::int32_t a, std::int32_t b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    };
    for (std::int32_t c = 0; c < m.n_cells(); ++c) {
        const Cell& t = m.cells()[c];
        for (int e = 0; e < 3; ++e) {
            auto [it, fresh] =
                edge_cells.try_emplace(key_of(t.v[e], t.v[(e + 1) % 3]),
                                       std::array<std::int32_t, 2>{-1, -1});
            if (it->second[0] < 0) it->second[0] = c;
            else it->second[1] = c;
        }
    }
    for (const auto& [key, cells] : edge_cells) {
        if (cells[1] < 0) continue; // boundary edge
        const auto a = static_cast<std::int32_t>(key >> 32);
        const auto b = static_cast<std::int32_t>(key & 0xffffffffu);
        const Vec2 pa = m.vertices()[a], pb = m.vertices()[b];
        const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
        const Vec2 nu = {(pb.y - pa.y) / len, -(pb.x - pa.x) / len};
        const Vec2 dg = {grad[cells[0]].x - grad[cells[1]].x,
                         grad[cells[0]].y - grad[cells[1]].y};
        const double jump = dg.x * nu.x + dg.y * nu.y;
        const double contrib = len * (jump * jump * len); // h_e * ||J||^2_{0,e}
        est.eta_sq[cells[0]] += contrib;
        est.eta_sq[cells[1]] += contrib;
    }

    double total = 0.0;
    for (double v : est.eta_sq) total += v;
    est.total_eta = std::sqrt(total);
    return est;
}

std::vector<std::int32_t> mark_dorfler(const EstimatorField& est, double theta_mark) {
    if (!(theta_mark > 0.0 && theta_mark < 1.0))
        throw Error("bad-config", "Dorfler parameter must lie in (0, 1)");
    const double total = est.total_eta * est.total_eta;
    if (total <= 0.0) return {};

    std::vector<std::int32_t> order(est.eta_sq.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        if (est.eta_sq[a] != est.eta_sq[b]) return est.eta_sq[a] > est.eta_sq[b];
        return a < b;
    });

    std::vector<std::int32_t> marked;
    double acc = 0.0;
    for (std::int32_t c : order) {
        if (est.eta_sq[c] <= 0.0) break;
        marked.push_back(c);
        acc += est.eta_sq[c];
        if (acc >= theta_mark * total) break;
    }
    std::sort(marked.begin(), marked.end());
    return marked;
}

AdaptReport adaptive_loop(const SolverConfig& cfg) {
    const ScalarField W = cfg.potential();

    AdaptReport report;
    report.config = cfg;
    Stopwatch wall;

    MeshPtr mesh = build_initial_mesh(cfg.domain);
    const FeSpacePtr V_H = FeSpace::dirichlet(mesh);
    std::vector<FeSpacePtr> chain{V_H};

    Stopwatch t_iter;
    ScfResult init = scf_solve(V_H, W, cfg.zeta, cfg.scf);
    Eigenpair pair = std::move(init.pair);
    double warm_alpha = 1.0;

    for (int iter = 0;; ++iter) {
        const FeSpacePtr& space = chain.back();
        const EstimatorField est = estimate(*space, pair, W, cfg.zeta);

        AdaptRecord rec;
        rec.iter = iter;
        rec.n_dofs = space->n_dofs();
        rec.lambda = pair.lambda;
        rec.total_eta = est.total_eta;
        rec.t_total = t_iter.seconds();
        report.records.push_back(rec);

        if (space->n_dofs() >= cfg.max_dofs) break;
        const std::vector<std::int32_t> marked = mark_dorfler(est, cfg.theta_mark);
        if (marked.empty()) break;

        t_iter.reset();
        mesh = refine_adaptive(mesh, marked);
        chain.push_back(FeSpace::dirichlet(mesh));

        // mesh grading makes the max diameter a poor accuracy proxy; scale the
        // inner tolerance with the mean cell size instead
        const double varsigma = cfg.c_sigma * mesh->total_area() / mesh->n_cells();
        CorrectionResult res = one_correction_step(V_H, pair, chain, W, cfg.zeta, varsigma,
                                                   cfg.scf, NonlinearUpdate::tensor, warm_alpha);
        pair = std::move(res.pair);
        warm_alpha = res.warm_alpha;
    }

    report.final_pair = std::move(pair);
    report.wall_s = wall.seconds();
    return report;
}

} // namespace gpe
