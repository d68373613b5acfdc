#include "herdreg/market.hpp"

#include <cmath>
#include <stdexcept>

namespace herdreg {

double leader_decision(const MarketParams& m, double leader_alpha, double t) {
    return m.nu / (leader_alpha * m.sigma * m.sigma) * std::exp(m.r * (t - m.T));
}

PolicyUtility PolicyUtility::linear(double slope) {
    PolicyUtility u;
    u.linear_slope_ = slope;
    u.value_ = [slope](double q) { return slope * q; };
    u.derivative_ = [slope](double) { return slope; };
    return u;
}

PolicyUtility PolicyUtility::custom(std::function<double(double)> value,
                                    std::function<double(double)> derivative) {
    PolicyUtility u;
    u.value_ = std::move(value);
    u.derivative_ = std::move(derivative);
    return u;
}

CompensationUtility CompensationUtility::linear(double slope) {
    CompensationUtility v;
    v.linear_slope_ = slope;
    v.value_ = [slope](double c) { return slope * c; };
    v.derivative_ = [slope](double) { return slope; };
    v.inverse_ = [slope](double y) { return y / slope; };
    return v;
}

CompensationUtility CompensationUtility::custom(std::function<double(double)> value,
                                                std::function<double(double)> derivative,
                                                std::function<double(double)> inverse,
                                                double c_max) {
    CompensationUtility v;
    v.value_ = std::move(value);
    v.derivative_ = std::move(derivative);
    v.inverse_ = std::move(inverse);
    v.c_max_ = c_max;
    return v;
}

double CompensationUtility::inverse(double y) const {
    if (!std::isfinite(y) || y < 0.0) throw std::domain_error("compensation utility inverse: y must be finite and >= 0");
    if (inverse_) return inverse_(y);
    if (y == 0.0) return 0.0;
    double lo = 0.0, hi = c_max_;
    if (value_(hi) < y) throw std::domain_error("compensation utility inverse: y exceeds v(c_max)");
    // v increasing and continuous: plain bisection to ~1 ulp of the bracket.
    for (int i = 0; i < 200 && (hi - lo) > 1e-15 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (value_(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<std::string> validate(const MarketParams& m,
                                  const AgentProfiles& profiles,
                                  const PolicyUtility& u,
                                  const CompensationUtility& v,
                                  const CostSpec& cost) {
    std::vector<std::string> out;
    auto bad = [](double x) { return !std::isfinite(x); };

    if (bad(m.r)) out.push_back("r must be finite");
    if (bad(m.nu)) out.push_back("nu must be finite");
    if (bad(m.sigma) || m.sigma <= 0.0) out.push_back("sigma must be positive");
    if (bad(m.T) || m.T <= 0.0) out.push_back("T must be positive");

    if (bad(profiles.leader_alpha) || profiles.leader_alpha <= 0.0)
        out.push_back("leader_alpha must be positive");
    if (bad(profiles.follower_alpha) || profiles.follower_alpha <= 0.0)
        out.push_back("follower_alpha must be positive");
    if (bad(profiles.eta) || profiles.eta < 0.0) out.push_back("eta must be nonnegative");

    // u(q) < q keeps the effective herd coefficient eta - u(q) positive for
    // every policy q <= eta. Linear family: slope in (0, 1); custom: sampled.
    if (u.is_linear()) {
        if (u.slope() <= 0.0 || u.slope() >= 1.0) out.push_back("u(q)<q required");
    } else {
        const double qs[] = {1e-6, 1e-3, 0.01, 0.1, 1.0, 10.0};
        bool ok = u(0.0) == 0.0;
        for (double q : qs) ok = ok && u(q) < q && u(q) > 0.0;
        if (!ok) out.push_back("u(q)<q required");
    }

    if (v.is_linear()) {
        if (v.slope() <= 0.0) out.push_back("v must be strictly increasing");
    } else {
        bool ok = v(0.0) == 0.0 && v(1.0) > 0.0 && v(2.0) > v(1.0);
        if (!ok) out.push_back("v must be strictly increasing");
    }

    if (bad(cost.kappa) || cost.kappa < 0.0) out.push_back("kappa must be nonnegative");
    return out;
}

}  // namespace herdreg
