#include "herdreg/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace herdreg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        throw std::runtime_error("config: bad numeric value for '" + key + "': " + value);
    return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long x = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        throw std::runtime_error("config: bad integer value for '" + key + "': " + value);
    return std::uint64_t(x);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw std::runtime_error("config: empty element in list for '" + key + "'");
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw std::runtime_error("config: empty list for '" + key + "'");
    return out;
}

}  // namespace

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "r")
        cfg.market.r = parse_double(key, value);
    else if (key == "nu")
        cfg.market.nu = parse_double(key, value);
    else if (key == "sigma")
        cfg.market.sigma = parse_double(key, value);
    else if (key == "T")
        cfg.market.T = parse_double(key, value);
    else if (key == "leader_alpha")
        cfg.profiles.leader_alpha = parse_double(key, value);
    else if (key == "follower_alpha")
        cfg.profiles.follower_alpha = parse_double(key, value);
    else if (key == "eta")
        cfg.profiles.eta = parse_double(key, value);
    else if (key == "kappa")
        cfg.kappa = parse_double(key, value);
    else if (key == "u_slope")
        cfg.u_slope = parse_double(key, value);
    else if (key == "v_slope")
        cfg.v_slope = parse_double(key, value);
    else if (key == "seed")
        cfg.seed = parse_u64(key, value);
    else if (key == "sweep_axis") {
        if (value != "alpha" && value != "eta" && !value.empty())
            throw std::runtime_error("config: sweep_axis must be 'alpha' or 'eta', got '" +
                                     value + "'");
        cfg.sweep_axis = value;
    } else if (key == "sweep_min")
        cfg.sweep_min = parse_double(key, value);
    else if (key == "sweep_max")
        cfg.sweep_max = parse_double(key, value);
    else if (key == "sweep_n") {
        const double n = parse_double(key, value);
        if (n != std::floor(n) || n < 1 || n > 1e9)
            throw std::runtime_error("config: sweep_n must be a positive integer");
        cfg.sweep_n = int(n);
    } else if (key == "kappa_list")
        cfg.kappa_list = parse_double_list(key, value);
    else
        throw std::runtime_error("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base) {
    ExperimentConfig cfg = base;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        try {
            apply_key(cfg, key, value);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), base);
}

std::vector<std::string> ExperimentConfig::validate() const {
    std::vector<std::string> issues =
        herdreg::validate(market, profiles, policy_utility(), compensation_utility(), cost());
    if (!sweep_axis.empty()) {
        if (sweep_axis != "alpha" && sweep_axis != "eta")
            issues.push_back("sweep_axis must be 'alpha' or 'eta'");
        if (!(sweep_min <= sweep_max)) issues.push_back("sweep range must satisfy min <= max");
        if (sweep_n < 2) issues.push_back("sweep_n must be at least 2");
        if (sweep_axis == "alpha" && !(sweep_min > 0.0))
            issues.push_back("alpha sweep must start above 0");
        if (sweep_axis == "eta" && !(sweep_min >= 0.0))
            issues.push_back("eta sweep must start at or above 0");
    }
    for (double k : kappa_list)
        if (!(k >= 0.0) || !std::isfinite(k)) issues.push_back("kappa_list entries must be >= 0");
    if (kappa_list.empty()) issues.push_back("kappa_list must be nonempty");
    return issues;
}

}  // namespace herdreg
