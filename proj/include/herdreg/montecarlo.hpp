#pragma once

#include <cstdint>

#include "herdreg/market.hpp"

namespace herdreg {

/// Monte Carlo engine configuration. Runs with equal (config, seed) are
/// bit-identical, independent of thread count and scheduling.
struct SimConfig {
    std::int64_t paths = 100000;
    std::int64_t steps = 10000;  ///< Euler time steps over [0, T]
    std::uint64_t seed = 12345;
};

/// Path statistics of the terminal fund x_T and of the exponential utility
/// -exp(-alpha x_T)/alpha at the follower's risk aversion.
struct SimResult {
    double mean_terminal_fund = 0.0;
    double std_error = 0.0;
    double mean_utility = 0.0;
    double utility_std_error = 0.0;
};

/// Simulates dx = (r x + nu pi_t) dt + sigma pi_t dW from x_0 = 0 under the
/// proportional strategy pi_t = ratio * pi_leader(t) by Euler-Maruyama and
/// returns the path means of x_T and of -exp(-alpha x_T)/alpha with their
/// standard errors (alpha = profiles.follower_alpha; the leader decision uses
/// profiles.leader_alpha).
///
/// The diffusion coefficient is state-independent along a proportional
/// strategy, so the Euler scheme has no state-dependent diffusion error and
/// the scheme is weakly first order in the time step.
///
/// Each path draws from its own deterministically seeded generator keyed by
/// (seed, path index); accumulation is per fixed-size block, and blocks are
/// reduced in index order, so the result does not depend on how paths are
/// scheduled across threads. ratio = 0 yields exactly 0 with zero variance.
///
/// Throws std::domain_error on invalid market/profile parameters, nonpositive
/// paths/steps, or nonfinite ratio.
SimResult simulate_terminal_fund(const MarketParams& m, const AgentProfiles& profiles,
                                 double ratio, const SimConfig& cfg);

}  // namespace herdreg
