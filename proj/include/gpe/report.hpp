#pragma once

#include "gpe/adapt.hpp"
#include "gpe/driver.hpp"

#include <string>
#include <vector>

namespace gpe {

std::string report_to_json(const SolveReport& report);

/// header: level,n_dofs,lambda,scf_iters,mg_cycles,t_linear_s,t_nonlinear_s,t_total_s,err_lambda
std::string levels_to_csv(const SolveReport& report);

struct BenchRow {
    std::string method;
    double zeta = 0.0;
    int level = 0;
    int n_dofs = 0;
    double t_total_s = 0.0;
};
std::string bench_to_csv(const std::vector<BenchRow>& rows);

std::string adapt_to_csv(const AdaptReport& report);

void write_text_file(const std::string& path, const std::string& content);

} // namespace gpe
