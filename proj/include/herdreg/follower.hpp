#pragma once

#include "herdreg/fixed_point.hpp"
#include "herdreg/market.hpp"

namespace herdreg {

/// Follower's best response under an effective herd coefficient lambda.
/// The optimal decision is proportional to the leader's:
///   pi(t) = ratio * leader_decision(t),
///   ratio = (leader_alpha sigma^2 mu + lambda) / (alpha sigma^2 mu + lambda).
struct FollowerSolution {
    double lambda = 0.0;
    double mu = 0.0;      ///< fixed point of the pricing map at this lambda
    double ratio = 1.0;   ///< proportionality to the leader's decision
    double deviation = 0.0;                ///< accumulated squared deviation delta
    double expected_terminal_fund = 0.0;   ///< E x_T = ratio nu^2 T / (leader_alpha sigma^2)
    double expected_utility = 0.0;         ///< E phi(x_T) = -mu / alpha
    double residual = 0.0;                 ///< fixed-point residual
    int iterations = 0;
    bool multiple_roots = false;
};

/// Solves the follower's response for a given effective herd coefficient.
FollowerSolution solve_follower(const MarketParams& m, double alpha, double leader_alpha,
                                double lambda);

/// Follower's risky position at time t under the solved response.
double decision_at_time(const FollowerSolution& sol, const MarketParams& m, double leader_alpha,
                        double t);

/// Deviation functional for a proportional strategy pi = ratio * leader:
///   delta = 1/2 int_0^T e^{2r(T-t)} (pi_t - leader_t)^2 dt
///         = 1/2 (ratio - 1)^2 nu^2 T / (leader_alpha^2 sigma^4).
/// The discounting and the leader's decay cancel exactly, so the integrand is
/// constant in t.
double proportional_deviation(double ratio, const MarketParams& m, double leader_alpha);

/// Follower's realized objective when the response is solved at
/// `lambda_used` (the effective coefficient eta - u(q)) and the deviation is
/// charged at that same weight:
///   -mu(lambda_used)/alpha - lambda_used * deviation + comp_utility_gain.
/// With lambda_used = eta and zero compensation this is the unregulated
/// objective. Requires eta >= lambda_used >= 0.
double follower_objective(const MarketParams& m, double alpha, double leader_alpha, double eta,
                          double lambda_used, double comp_utility_gain);

}  // namespace herdreg
