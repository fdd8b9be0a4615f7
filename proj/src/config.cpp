#include "gpe/config.hpp"

#include "gpe/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gpe {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw Error("bad-config", "key '" + key + "' has a malformed numeric value '" + v + "'");
    }
}

long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw Error("bad-config", "key '" + key + "' has a malformed integer value '" + v + "'");
    }
}

} // namespace

ParsedConfig parse_config_text(const std::string& text) {
    ParsedConfig out;
    std::istringstream in(text);
    std::string line;
    std::string section; // "", "scf", "bench"

    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw Error("bad-config", "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "scf" && section != "bench")
                throw Error("bad-config", "unknown section '" + section + "'");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("bad-config", "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw Error("bad-config", "empty key or value in '" + line + "'");

        SolverConfig& s = out.solver;
        if (section.empty()) {
            if (key == "domain") {
                if (value == "unit_square") s.domain.kind = DomainKind::unit_square;
                else if (value == "l_shape") s.domain.kind = DomainKind::l_shape;
                else if (value == "unit_cube") s.domain.kind = DomainKind::unit_cube;
                else throw Error("bad-config", "key 'domain' has unknown value '" + value + "'");
            } else if (key == "subdivision") {
                s.domain.initial_subdivision = static_cast<int>(parse_int(key, value));
            } else if (key == "levels") {
                s.n_levels = static_cast<int>(parse_int(key, value));
            } else if (key == "zeta") {
                s.zeta = parse_real(key, value);
                if (s.zeta < 0.0) throw Error("bad-config", "key 'zeta' must be >= 0");
            } else if (key == "w") {
                const auto t = tokens(value);
                if (t.size() != 2) throw Error("bad-config", "key 'w' needs two coefficients");
                s.w_coeffs = {parse_real(key, t[0]), parse_real(key, t[1])};
            } else if (key == "method") {
                if (value == "tensor") s.method = SolverConfig::Method::tensor;
                else if (value == "baseline") s.method = SolverConfig::Method::baseline;
                else if (value == "direct") s.method = SolverConfig::Method::direct;
                else throw Error("bad-config", "key 'method' has unknown value '" + value + "'");
            } else if (key == "c_sigma") {
                s.c_sigma = parse_real(key, value);
            } else if (key == "final_sweeps") {
                s.final_sweeps = static_cast<int>(parse_int(key, value));
            } else if (key == "seed") {
                s.seed = static_cast<unsigned>(parse_int(key, value));
            } else if (key == "theta_mark") {
                s.theta_mark = parse_real(key, value);
            } else if (key == "max_dofs") {
                s.max_dofs = static_cast<int>(parse_int(key, value));
            } else {
                throw Error("bad-config", "unknown key '" + key + "'");
            }
        } else if (section == "scf") {
            if (key == "theta") s.scf.theta = parse_real(key, value);
            else if (key == "tol_lambda") s.scf.tol_lambda = parse_real(key, value);
            else if (key == "tol_u") s.scf.tol_u = parse_real(key, value);
            else if (key == "max_iters") s.scf.max_iters = static_cast<int>(parse_int(key, value));
            else throw Error("bad-config", "unknown key 'scf." + key + "'");
        } else { // bench
            if (key == "zeta_values") {
                out.bench.zeta_values.clear();
                for (const auto& t : tokens(value))
                    out.bench.zeta_values.push_back(parse_real(key, t));
                if (out.bench.zeta_values.empty())
                    throw Error("bad-config", "key 'bench.zeta_values' is empty");
            } else if (key == "methods") {
                out.bench.methods = tokens(value);
                for (const auto& mname : out.bench.methods)
                    if (mname != "tensor" && mname != "baseline" && mname != "direct-linear")
                        throw Error("bad-config",
                                    "key 'bench.methods' has unknown value '" + mname + "'");
            } else {
                throw Error("bad-config", "unknown key 'bench." + key + "'");
            }
        }
    }
    return out;
}

ParsedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("bad-config", "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace gpe
