#pragma once

#include <stdexcept>
#include <string>

#include "herdreg/market.hpp"

namespace herdreg {

/// Raised when an iterative solve fails to reach its residual target.
/// Carries the last residual for diagnostics.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, double residual)
        : std::runtime_error(msg), last_residual(residual) {}
    double last_residual;
};

/// Solution of the scalar fixed point mu = F(mu) that prices the follower's
/// expected utility under herding, where
///   F(mu) = exp{ [ (alpha/leader_alpha - 1)^2 lambda^2 / (alpha sigma^2 mu + lambda)^2 - 1 ] k },
/// k = nu^2 T / (2 sigma^2), and lambda >= 0 is the effective herd
/// coefficient (true coefficient minus policy utility).
struct FixedPointSolution {
    double lambda = 0.0;
    double mu = 0.0;
    double residual = 0.0;  ///< |mu - F(mu)| at the returned mu
    int iterations = 0;
    int sign_changes = 1;   ///< sign changes of mu - F(mu) on the 64-point bracket scan
    bool multiple_roots = false;  ///< diagnostic only; the smallest root is returned
};

/// Solves mu = F(mu) for the given effective herd coefficient.
///
/// lambda = 0 and alpha == leader_alpha short-circuit to the exact value
/// e^{-k}. Otherwise the root of G(mu) = mu - F(mu) is bisected inside the
/// analytic bracket [e^{-k}, e^{(A-1)k}], A = (alpha/leader_alpha - 1)^2,
/// which F maps into itself; a 64-point scan of G over the bracket flags
/// multiple sign changes (diagnostic, not an error) and the smallest root's
/// bracket is used. Residual target 1e-13 (contract: <= 1e-12), iteration cap
/// 200, with a damped fixed-point fallback before giving up.
FixedPointSolution solve_mu(const MarketParams& m, double alpha, double leader_alpha,
                            double lambda);

/// Analytic sensitivity d mu / d lambda via the implicit function theorem:
///   dmu/dlambda = [2 k A alpha sigma^2 mu^2 lambda / D^3] / [1 + 2 k A alpha sigma^2 mu lambda^2 / D^3],
/// D = alpha sigma^2 mu + lambda. Zero at lambda = 0 or alpha = leader_alpha,
/// strictly positive otherwise.
double dmu_dlambda(const MarketParams& m, double alpha, double leader_alpha, double lambda,
                   double mu);

}  // namespace herdreg
