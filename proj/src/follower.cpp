#include "herdreg/follower.hpp"

#include <cmath>
#include <stdexcept>

namespace herdreg {

FollowerSolution solve_follower(const MarketParams& m, double alpha, double leader_alpha,
                                double lambda) {
    const FixedPointSolution fp = solve_mu(m, alpha, leader_alpha, lambda);

    FollowerSolution sol;
    sol.lambda = lambda;
    sol.mu = fp.mu;
    sol.residual = fp.residual;
    sol.iterations = fp.iterations;
    sol.multiple_roots = fp.multiple_roots;

    const double s2 = m.sigma * m.sigma;
    sol.ratio = (leader_alpha * s2 * fp.mu + lambda) / (alpha * s2 * fp.mu + lambda);
    sol.deviation = proportional_deviation(sol.ratio, m, leader_alpha);
    sol.expected_terminal_fund = sol.ratio * m.nu * m.nu * m.T / (leader_alpha * s2);
    sol.expected_utility = -fp.mu / alpha;
    return sol;
}

double decision_at_time(const FollowerSolution& sol, const MarketParams& m, double leader_alpha,
                        double t) {
    return sol.ratio * leader_decision(m, leader_alpha, t);
}

double proportional_deviation(double ratio, const MarketParams& m, double leader_alpha) {
    const double s2 = m.sigma * m.sigma;
    const double d = ratio - 1.0;
    return 0.5 * d * d * m.nu * m.nu * m.T / (leader_alpha * leader_alpha * s2 * s2);
}

double follower_objective(const MarketParams& m, double alpha, double leader_alpha, double eta,
                          double lambda_used, double comp_utility_gain) {
    if (!(lambda_used >= 0.0))
        throw std::domain_error("follower_objective: penalty weight must be >= 0");
    if (!(eta >= lambda_used))
        throw std::domain_error("follower_objective: eta must be >= lambda_used");
    if (!(comp_utility_gain >= 0.0))
        throw std::domain_error("follower_objective: compensation utility must be >= 0");
    const FollowerSolution sol = solve_follower(m, alpha, leader_alpha, lambda_used);
    return sol.expected_utility - lambda_used * sol.deviation + comp_utility_gain;
}

}  // namespace herdreg
