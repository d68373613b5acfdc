#include "herdreg/fixed_point.hpp"

#include <algorithm>
#include <cmath>

namespace herdreg {

namespace {

constexpr double kResidualTarget = 1e-13;
constexpr int kIterationCap = 200;
constexpr int kScanPoints = 64;

struct Map {
    double k;       // nu^2 T / (2 sigma^2)
    double A;       // (alpha/leader_alpha - 1)^2
    double as2;     // alpha sigma^2
    double lambda;

    double operator()(double mu) const {
        const double D = as2 * mu + lambda;
        const double t = lambda / D;
        return std::exp((A * t * t - 1.0) * k);
    }
};

void check_domain(const MarketParams& m, double alpha, double leader_alpha, double lambda) {
    if (!(m.sigma > 0.0) || !(m.T > 0.0) || !std::isfinite(m.nu) || !std::isfinite(m.r))
        throw std::domain_error("solve_mu: invalid market parameters");
    if (!(alpha > 0.0) || !(leader_alpha > 0.0))
        throw std::domain_error("solve_mu: risk coefficients must be positive");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::domain_error("solve_mu: lambda must be finite and >= 0");
}

}  // namespace

FixedPointSolution solve_mu(const MarketParams& m, double alpha, double leader_alpha,
                            double lambda) {
    check_domain(m, alpha, leader_alpha, lambda);

    const double k = m.merton_exponent();
    const double A = (alpha / leader_alpha - 1.0) * (alpha / leader_alpha - 1.0);

    FixedPointSolution sol;
    sol.lambda = lambda;

    // No herding penalty, or follower identical to leader: mu = e^{-k} exactly.
    if (lambda == 0.0 || alpha == leader_alpha) {
        sol.mu = std::exp(-k);
        sol.residual = 0.0;
        return sol;
    }

    const Map F{k, A, alpha * m.sigma * m.sigma, lambda};

    // F is monotone in mu with range (e^{-k}, e^{(A-1)k}) on mu > 0, so
    // G(mu) = mu - F(mu) changes sign inside the closed analytic bracket.
    double lo = std::exp(-k);
    double hi = std::exp((A - 1.0) * k);
    if (lo > hi) std::swap(lo, hi);

    auto G = [&](double mu) { return mu - F(mu); };

    // Scan for multiple roots (diagnostic); keep the bracket of the smallest.
    // The scan walks a fixed grid; the bisection bracket [lo, hi] is only
    // assigned, never read, inside the loop.
    const double scan_lo = lo, scan_hi = hi;
    double glo = G(scan_lo);
    sol.sign_changes = 0;
    {
        double prev_x = scan_lo, prev_g = glo;
        bool bracket_found = false;
        for (int i = 1; i <= kScanPoints; ++i) {
            const double x = scan_lo + (scan_hi - scan_lo) * i / kScanPoints;
            const double g = G(x);
            if ((prev_g <= 0.0 && g > 0.0) || (prev_g >= 0.0 && g < 0.0)) {
                ++sol.sign_changes;
                if (!bracket_found) {
                    bracket_found = true;
                    lo = prev_x;
                    hi = x;
                    glo = prev_g;
                }
            }
            prev_x = x;
            prev_g = g;
        }
        sol.multiple_roots = sol.sign_changes > 1;
        // No strict sign change (root sits at a scan node or flat region):
        // fall back to the full analytic bracket.
        if (!bracket_found) {
            lo = scan_lo;
            hi = scan_hi;
            glo = G(lo);
            sol.sign_changes = 1;
            sol.multiple_roots = false;
        }
    }

    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < kIterationCap; ++i) {
        mid = 0.5 * (lo + hi);
        const double g = G(mid);
        ++sol.iterations;
        if (std::abs(g) <= kResidualTarget) {
            sol.mu = mid;
            sol.residual = std::abs(g);
            return sol;
        }
        if ((g < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = g;
        } else {
            hi = mid;
        }
    }

    // Damped fixed-point fallback: mu <- (1-beta) mu + beta F(mu).
    constexpr double beta = 0.5;
    double mu = mid;
    double residual = std::abs(G(mu));
    for (int i = 0; i < kIterationCap; ++i) {
        mu = (1.0 - beta) * mu + beta * F(mu);
        residual = std::abs(G(mu));
        ++sol.iterations;
        if (residual <= kResidualTarget) {
            sol.mu = mu;
            sol.residual = residual;
            return sol;
        }
    }
    throw SolverError("solve_mu: residual target not reached", residual);
}

double dmu_dlambda(const MarketParams& m, double alpha, double leader_alpha, double lambda,
                   double mu) {
    check_domain(m, alpha, leader_alpha, lambda);
    if (lambda == 0.0 || alpha == leader_alpha) return 0.0;

    const double k = m.merton_exponent();
    const double A = (alpha / leader_alpha - 1.0) * (alpha / leader_alpha - 1.0);
    const double as2 = alpha * m.sigma * m.sigma;
    const double D = as2 * mu + lambda;
    const double D3 = D * D * D;
    const double num = 2.0 * k * A * as2 * mu * mu * lambda / D3;
    const double den = 1.0 + 2.0 * k * A * as2 * mu * lambda * lambda / D3;
    return num / den;
}

}  // namespace herdreg
