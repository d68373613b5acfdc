#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace herdreg {

/// Constant-coefficient market: one risk-free asset with rate `r` and one
/// risky asset with excess return `nu` and volatility `sigma`, on [0, T].
struct MarketParams {
    double r = 0.04;      ///< risk-free rate per unit time
    double nu = 0.03;     ///< excess return of the risky asset
    double sigma = 0.17;  ///< volatility of the risky asset
    double T = 50.0;      ///< investment horizon

    /// k = nu^2 T / (2 sigma^2). The baseline expected-utility parameter of a
    /// CARA investor holding her own optimal decision is exp(-k).
    double merton_exponent() const { return nu * nu * T / (2.0 * sigma * sigma); }
};

/// Risk coefficients of the two investors and the follower's true herd
/// coefficient (weight of the penalty on deviating from the leader).
struct AgentProfiles {
    double leader_alpha = 0.3;     ///< leader's absolute risk aversion
    double follower_alpha = 0.25;  ///< follower's absolute risk aversion
    double eta = 0.01;             ///< follower's herd coefficient, >= 0
};

/// Heaviside step with the convention step(0) = 0.
inline double unit_step(double x) { return x > 0.0 ? 1.0 : 0.0; }

/// Leader's optimal risky position at time t: nu/(alpha sigma^2) e^{r(t-T)}.
/// Discounted to horizon it is constant: e^{r(T-t)} pi(t) = nu/(alpha sigma^2).
double leader_decision(const MarketParams& m, double leader_alpha, double t);

/// Utility of a policy magnitude to the follower, expressed as a reduction of
/// the herd coefficient. Required shape: u(0) = 0, u increasing, u(q) < q for
/// q > 0 (a policy never pays back more coefficient than its own magnitude).
class PolicyUtility {
public:
    /// u(q) = slope * q with slope in (0, 1).
    static PolicyUtility linear(double slope);

    /// Arbitrary differentiable utility; the caller keeps u(q) < q.
    static PolicyUtility custom(std::function<double(double)> value,
                                std::function<double(double)> derivative);

    double operator()(double q) const { return value_(q); }
    double derivative(double q) const { return derivative_(q); }

    bool is_linear() const { return linear_slope_ > 0.0; }
    double slope() const { return linear_slope_; }

private:
    PolicyUtility() = default;
    std::function<double(double)> value_;
    std::function<double(double)> derivative_;
    double linear_slope_ = 0.0;  // 0 when custom
};

/// Utility of monetary compensation. Increasing with v(0) = 0; the inverse is
/// analytic for the linear family and bisected on [0, c_max] otherwise.
class CompensationUtility {
public:
    /// v(c) = slope * c with slope > 0.
    static CompensationUtility linear(double slope);

    /// Arbitrary strictly increasing utility with v(0) = 0. If no inverse is
    /// supplied, inverse() bisects on [0, c_max].
    static CompensationUtility custom(std::function<double(double)> value,
                                      std::function<double(double)> derivative,
                                      std::function<double(double)> inverse = nullptr,
                                      double c_max = 1e12);

    double operator()(double c) const { return value_(c); }
    double derivative(double c) const { return derivative_(c); }

    /// v^{-1}(y) for y >= 0. Throws std::domain_error if y is not reachable
    /// on [0, c_max].
    double inverse(double y) const;

    bool is_linear() const { return linear_slope_ > 0.0; }
    double slope() const { return linear_slope_; }

private:
    CompensationUtility() = default;
    std::function<double(double)> value_;
    std::function<double(double)> derivative_;
    std::function<double(double)> inverse_;
    double linear_slope_ = 0.0;
    double c_max_ = 1e12;
};

/// Fixed intervention cost charged to the regulator: w(q) = kappa * step(q).
struct CostSpec {
    double kappa = 0.0;
    double operator()(double q) const { return kappa * unit_step(q); }
};

/// Validates a full parameter set. Returns a list of human-readable
/// violations; empty means valid. Violations are data, not exceptions.
std::vector<std::string> validate(const MarketParams& m,
                                  const AgentProfiles& profiles,
                                  const PolicyUtility& u,
                                  const CompensationUtility& v,
                                  const CostSpec& cost);

}  // namespace herdreg
