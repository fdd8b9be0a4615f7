#include "gpe/driver.hpp"

#include "gpe/error.hpp"
#include "gpe/kernels.hpp"
#include "gpe/mglinear.hpp"
#include "gpe/util.hpp"

#include <algorithm>
#include <cmath>

namespace gpe {

ScalarField SolverConfig::potential() const {
    const double g0 = w_coeffs[0], g1 = w_coeffs[1];
    return [g0, g1](double x, double y) { return g0 * x * x + g1 * y * y; };
}

const char* SolverConfig::method_name(Method m) {
    switch (m) {
    case Method::tensor: return "tensor";
    case Method::baseline: return "baseline";
    default: return "direct";
    }
}

CorrectionResult one_correction_step(const FeSpacePtr& V_H, const Eigenpair& pair_k,
                                     const std::vector<FeSpacePtr>& mg_chain, const ScalarField& W,
                                     double zeta, double varsigma, const ScfConfig& cfg,
                                     NonlinearUpdate mode, double warm_alpha) {
    const FeSpacePtr& fine = mg_chain.back();
    CorrectionResult res;

    Stopwatch t_lin;
    // frozen-density source problem on the fine space
    std::vector<double> u_k_fine =
        prolongation(*pair_k.coeffs.space, *fine).multiply(pair_k.coeffs.values);
    const MgHierarchy hierarchy =
        build_hierarchy(mg_chain, W, zeta, CoeffVec{fine, u_k_fine});
    const SparseMatrix mass_fine = assemble_mass(*fine);
    AuxSolveResult aux =
        solve_aux(hierarchy, pair_k.lambda, u_k_fine, mass_fine, varsigma);
    res.mg_cycles = aux.cycles;

    const BorderStatics statics =
        assemble_border_statics(V_H, fine, CoeffVec{fine, std::move(aux.u_tilde)}, W, zeta,
                                /*build_tensor=*/mode == NonlinearUpdate::tensor);
    res.t_linear = t_lin.seconds();

    Stopwatch t_nonlin;
    // restriction of the current iterate: coarse vertices keep their indices
    // in every descendant, so nodal sampling is exact
    std::vector<double> u0(static_cast<std::size_t>(V_H->n_dofs()), 0.0);
    for (int d = 0; d < V_H->n_dofs(); ++d)
        u0[d] = value_at_vertex(pair_k.coeffs, V_H->interior_dofs()[d]);
    const double alpha0 = warm_alpha != 0.0 ? warm_alpha : 1.0;

    // the plain damped iteration here keeps the tensor/requadrature timing
    // comparison meaningful: both routes run the identical iteration count,
    // differing only in the per-iteration block refresh cost
    ScfConfig inner = cfg;
    inner.newton_polish = false;
    AugmentedSolution sol = augmented_scf(statics, std::move(u0), alpha0, inner, mode);
    res.pair = reconstruct(sol, statics, &mass_fine);
    res.t_nonlinear = t_nonlin.seconds();
    res.scf_iters = sol.iters;
    res.warm_alpha = sol.alpha;

    if (res.pair.lambda > pair_k.lambda + 0.1 * std::abs(pair_k.lambda))
        throw Error("correction-diverged", "eigenvalue rose by more than 10% in one step");
    return res;
}

namespace {

SolveReport run_multilevel(const SolverConfig& cfg, NonlinearUpdate mode) {
    if (cfg.n_levels < 2)
        throw Error("bad-config", "multilevel methods need n_levels >= 2");
    const ScalarField W = cfg.potential();

    SolveReport report;
    report.config = cfg;
    Stopwatch wall;

    std::vector<FeSpacePtr> chain;
    MeshPtr mesh = build_initial_mesh(cfg.domain);
    const FeSpacePtr V_H = FeSpace::dirichlet(mesh);
    chain.push_back(V_H);

    // initial solve on the first space (which shares the coarse mesh)
    Stopwatch t_level;
    ScfResult init = scf_solve(V_H, W, cfg.zeta, cfg.scf);
    {
        LevelRecord rec;
        rec.level = 1;
        rec.n_dofs = V_H->n_dofs();
        rec.lambda = init.pair.lambda;
        rec.scf_iters = init.iters;
        rec.t_nonlinear = rec.t_total = t_level.seconds();
        report.levels.push_back(rec);
    }

    Eigenpair pair = std::move(init.pair);
    double warm_alpha = 1.0;
    for (int k = 1; k < cfg.n_levels; ++k) {
        t_level.reset();
        mesh = refine_uniform(mesh);
        chain.push_back(FeSpace::dirichlet(mesh));
        const double h = mesh->max_diameter();
        const double varsigma = cfg.c_sigma * h * h;

        // repeated correction on the finest level tightens the consistency
        // gap toward the direct discrete eigenvalue by a coarse-space factor
        // per pass
        const int sweeps = (k + 1 == cfg.n_levels) ? std::max(1, cfg.final_sweeps) : 1;
        LevelRecord rec;
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            CorrectionResult res = one_correction_step(V_H, pair, chain, W, cfg.zeta, varsigma,
                                                       cfg.scf, mode, warm_alpha);
            pair = std::move(res.pair);
            warm_alpha = res.warm_alpha;
            rec.scf_iters += res.scf_iters;
            rec.mg_cycles += res.mg_cycles;
            rec.t_linear += res.t_linear;
            rec.t_nonlinear += res.t_nonlinear;
        }

        rec.level = k + 1;
        rec.n_dofs = chain.back()->n_dofs();
        rec.lambda = pair.lambda;
        rec.t_total = t_level.seconds();
        report.levels.push_back(rec);
    }

    for (auto& rec : report.levels) {
        if (rec.level < cfg.n_levels) {
            rec.err_lambda = std::abs(rec.lambda - pair.lambda);
            rec.has_err = true;
        }
    }
    report.final_pair = std::move(pair);
    report.wall_s = wall.seconds();
    return report;
}

} // namespace

SolveReport multigrid_gpe(const SolverConfig& cfg) {
    if (cfg.method != SolverConfig::Method::tensor)
        throw Error("bad-config", "multigrid_gpe expects method=tensor");
    return run_multilevel(cfg, NonlinearUpdate::tensor);
}

SolveReport baseline_multilevel(const SolverConfig& cfg) {
    if (cfg.method != SolverConfig::Method::baseline)
        throw Error("bad-config", "baseline_multilevel expects method=baseline");
    return run_multilevel(cfg, NonlinearUpdate::fine_quadrature);
}

SolveReport direct_fine_solve(const SolverConfig& cfg) {
    if (cfg.method != SolverConfig::Method::direct)
        throw Error("bad-config", "direct_fine_solve expects method=direct");
    const ScalarField W = cfg.potential();

    SolveReport report;
    report.config = cfg;
    Stopwatch wall;

    MeshPtr mesh = build_initial_mesh(cfg.domain);
    for (int k = 1; k < cfg.n_levels; ++k) mesh = refine_uniform(mesh);
    const FeSpacePtr space = FeSpace::dirichlet(mesh);

    Stopwatch t_level;
    ScfResult res = scf_solve(space, W, cfg.zeta, cfg.scf);

    LevelRecord rec;
    rec.level = cfg.n_levels;
    rec.n_dofs = space->n_dofs();
    rec.lambda = res.pair.lambda;
    rec.scf_iters = res.iters;
    rec.t_nonlinear = rec.t_total = t_level.seconds();
    report.levels.push_back(rec);

    report.final_pair = std::move(res.pair);
    report.wall_s = wall.seconds();
    return report;
}

SolveReport linear_bvp_reference(const SolverConfig& cfg) {
    const ScalarField W = cfg.potential();

    SolveReport report;
    report.config = cfg;
    Stopwatch wall;

    std::vector<FeSpacePtr> chain;
    MeshPtr mesh = build_initial_mesh(cfg.domain);
    chain.push_back(FeSpace::dirichlet(mesh));

    for (int k = 1; k <= cfg.n_levels; ++k) {
        if (k > 1) {
            mesh = refine_uniform(mesh);
            chain.push_back(FeSpace::dirichlet(mesh));
        }
        Stopwatch t_level;
        const FeSpacePtr& fine = chain.back();
        const MgHierarchy h = build_hierarchy(chain, W, 0.0, CoeffVec{});
        const SparseMatrix mass = assemble_mass(*fine);
        std::vector<double> rhs(static_cast<std::size_t>(fine->n_dofs()));
        {
            std::vector<double> ones(rhs.size(), 1.0);
            mass.multiply(ones.data(), rhs.data());
        }
        const double hd = mesh->max_diameter();
        const double tol = cfg.c_sigma * hd * hd;
        const double rhs_norm = std::sqrt(kernels::dot(rhs, rhs));
        std::vector<double> x(rhs.size(), 0.0), resid(rhs.size());
        int cycles = 0;
        for (; cycles < 100; ++cycles) {
            h.levels.back().A.multiply(x.data(), resid.data());
            kernels::axpby(1.0, rhs, -1.0, resid);
            if (std::sqrt(kernels::dot(resid, resid)) <= tol * rhs_norm) break;
            x = vcycle(h, rhs, x);
        }

        LevelRecord rec;
        rec.level = k;
        rec.n_dofs = fine->n_dofs();
        rec.mg_cycles = cycles;
        rec.t_linear = rec.t_total = t_level.seconds();
        report.levels.push_back(rec);
    }
    report.wall_s = wall.seconds();
    return report;
}

} // namespace gpe
