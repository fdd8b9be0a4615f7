#include "gpe/report.hpp"

#include "gpe/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace gpe {

namespace {

const char* domain_name(DomainKind k) {
    switch (k) {
    case DomainKind::unit_square: return "unit_square";
    case DomainKind::l_shape: return "l_shape";
    default: return "unit_cube";
    }
}

nlohmann::json config_json(const SolverConfig& c) {
    return {
        {"domain", domain_name(c.domain.kind)},
        {"subdivision", c.domain.initial_subdivision},
        {"levels", c.n_levels},
        {"zeta", c.zeta},
        {"w", {c.w_coeffs[0], c.w_coeffs[1]}},
        {"method", SolverConfig::method_name(c.method)},
        {"c_sigma", c.c_sigma},
        {"final_sweeps", c.final_sweeps},
        {"seed", c.seed},
        {"theta_mark", c.theta_mark},
        {"max_dofs", c.max_dofs},
        {"scf",
         {{"theta", c.scf.theta},
          {"tol_lambda", c.scf.tol_lambda},
          {"tol_u", c.scf.tol_u},
          {"max_iters", c.scf.max_iters}}},
    };
}

std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_time(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

std::string report_to_json(const SolveReport& report) {
    nlohmann::json j;
    j["config"] = config_json(report.config);
    j["levels"] = nlohmann::json::array();
    for (const LevelRecord& r : report.levels) {
        nlohmann::json row = {
            {"level", r.level},         {"n_dofs", r.n_dofs},
            {"lambda", r.lambda},       {"scf_iters", r.scf_iters},
            {"mg_cycles", r.mg_cycles}, {"t_linear_s", r.t_linear},
            {"t_nonlinear_s", r.t_nonlinear}, {"t_total_s", r.t_total},
        };
        if (r.has_err) row["err_lambda"] = r.err_lambda;
        j["levels"].push_back(std::move(row));
    }
    if (!report.levels.empty()) {
        j["final"] = {{"lambda", report.final_pair.lambda},
                      {"level", report.levels.back().level},
                      {"n_dofs", report.levels.back().n_dofs}};
    }
    j["wall_s"] = report.wall_s;
    return j.dump(2) + "\n";
}

std::string levels_to_csv(const SolveReport& report) {
    std::string out =
        "level,n_dofs,lambda,scf_iters,mg_cycles,t_linear_s,t_nonlinear_s,t_total_s,err_lambda\n";
    for (const LevelRecord& r : report.levels) {
        out += std::to_string(r.level) + ',' + std::to_string(r.n_dofs) + ',' +
               fmt_g17(r.lambda) + ',' + std::to_string(r.scf_iters) + ',' +
               std::to_string(r.mg_cycles) + ',' + fmt_time(r.t_linear) + ',' +
               fmt_time(r.t_nonlinear) + ',' + fmt_time(r.t_total) + ',' +
               (r.has_err ? fmt_g17(r.err_lambda) : std::string{}) + '\n';
    }
    return out;
}

std::string bench_to_csv(const std::vector<BenchRow>& rows) {
    std::string out = "method,zeta,level,n_dofs,t_total_s\n";
    for (const BenchRow& r : rows) {
        out += r.method + ',' + fmt_g17(r.zeta) + ',' + std::to_string(r.level) + ',' +
               std::to_string(r.n_dofs) + ',' + fmt_time(r.t_total_s) + '\n';
    }
    return out;
}

std::string adapt_to_csv(const AdaptReport& report) {
    std::string out = "iter,n_dofs,lambda,total_eta,t_total_s\n";
    for (const AdaptRecord& r : report.records) {
        out += std::to_string(r.iter) + ',' + std::to_string(r.n_dofs) + ',' + fmt_g17(r.lambda) +
               ',' + fmt_g17(r.total_eta) + ',' + fmt_time(r.t_total) + '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io-error", "cannot write '" + path + "'");
    out << content;
    if (!out) throw Error("io-error", "short write to '" + path + "'");
}

} // namespace gpe
