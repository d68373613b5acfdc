#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "herdreg/market.hpp"

namespace herdreg {

/// Full run configuration: market, agents, utilities, cost, sweep layout,
/// and the Monte Carlo seed. Defaults reproduce the reference experiments.
struct ExperimentConfig {
    MarketParams market;      // r=0.04, nu=0.03, sigma=0.17, T=50
    AgentProfiles profiles;   // leader_alpha=0.3, follower_alpha=0.25, eta=0.01
    double u_slope = 0.9;     ///< linear policy utility u(q) = u_slope * q
    double v_slope = 1.0;     ///< linear compensation utility v(c) = v_slope * c
    double kappa = 0.5;       ///< intervention cost for single-point solves
    std::string sweep_axis;   ///< "alpha" | "eta" | "" (single point)
    double sweep_min = 0.0;
    double sweep_max = 0.0;
    int sweep_n = 151;
    std::vector<double> kappa_list{0.0, 0.5};  ///< cost variants for sweeps
    std::uint64_t seed = 12345;

    PolicyUtility policy_utility() const { return PolicyUtility::linear(u_slope); }
    CompensationUtility compensation_utility() const {
        return CompensationUtility::linear(v_slope);
    }
    CostSpec cost() const { return CostSpec{kappa}; }

    /// Parameter violations (market/profile/utility domains plus sweep
    /// layout); empty means the configuration is usable.
    std::vector<std::string> validate() const;
};

/// Applies one key=value assignment. Keys: r, nu, sigma, T, leader_alpha,
/// follower_alpha, eta, kappa, u_slope, v_slope, seed, sweep_axis, sweep_min,
/// sweep_max, sweep_n, kappa_list (comma-separated). Unknown keys and
/// malformed values throw std::runtime_error naming the key.
void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Parses flat key=value text ('#' starts a comment; blank lines ignored)
/// on top of `base`. Throws std::runtime_error with the offending line number.
ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base = {});

/// Reads and parses a config file. Throws std::runtime_error (with the path)
/// when the file cannot be read or fails to parse.
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base = {});

}  // namespace herdreg
