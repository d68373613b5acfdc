#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "herdreg/follower.hpp"
#include "herdreg/market.hpp"

namespace herdreg {

/// Economic gain g(eta) sampled on a grid, with the verified-monotone prefix
/// and the supremum. g(eta) is the expected-terminal-fund improvement from
/// applying the full policy q = eta versus no policy.
struct GainCurve {
    std::vector<double> eta;
    std::vector<double> gain;
    std::size_t monotone_prefix = 0;  ///< one past the last index of the nondecreasing prefix
    double sup_gain = 0.0;
    double sup_arg = 0.0;
};

/// Gain from intervening with q = eta: E x_T at lambda = eta - u(eta) minus
/// E x_T at lambda = eta. Exactly 0 when follower_alpha >= leader_alpha
/// (policy off) or eta = 0.
double economic_gain(const MarketParams& m, const AgentProfiles& profiles,
                     const PolicyUtility& u, double eta);

/// Samples g on a log-spaced grid over (0, eta_max] and verifies the
/// monotone prefix. grid_n >= 64.
GainCurve gain_curve(const MarketParams& m, const AgentProfiles& profiles,
                     const PolicyUtility& u, double eta_max = 1.0, int grid_n = 257);

/// sup of g over (0, eta_max]: grid maximum plus golden-section refinement
/// around the grid argmax.
double gain_sup(const MarketParams& m, const AgentProfiles& profiles, const PolicyUtility& u,
                double eta_max = 1.0, int grid_n = 257);

/// Intervention threshold for a fixed cost kappa: the smallest eta with
/// g(eta) = kappa. "No intervention ever" is a value (eta_breve = +inf), not
/// an error.
struct ThresholdResult {
    double kappa = 0.0;
    bool intervene_ever = false;
    double eta_breve = std::numeric_limits<double>::infinity();
    double gain_sup = 0.0;
    double monotone_prefix_end = 0.0;  ///< last eta of the verified nondecreasing prefix
    bool crossing_in_prefix = true;    ///< false if the root lay beyond the verified prefix
};

/// Threshold reusing a precomputed gain curve (the curve is kappa-independent,
/// so one curve serves a whole kappa sweep). eta_breve is bisected to 1e-9.
ThresholdResult threshold(const MarketParams& m, const AgentProfiles& profiles,
                          const PolicyUtility& u, double kappa, const GainCurve& curve);

ThresholdResult threshold(const MarketParams& m, const AgentProfiles& profiles,
                          const PolicyUtility& u, double kappa, double eta_max = 1.0,
                          int grid_n = 257);

/// Switch policy: q* = eta when follower_alpha < leader_alpha and
/// eta > eta_breve (ties go to no intervention), else 0.
double optimal_policy(const AgentProfiles& profiles, const ThresholdResult& thr, double eta);

/// Deviation sensitivities at the fully regulated point lambda = eta - u(eta):
/// phi = d delta / d lambda (<= 0), psi = -u'(eta) * phi (>= 0). Central
/// finite differences with step 1e-6 * max(1, lambda); one-sided fallback
/// when lambda - h < 0. (0, 0) when follower_alpha >= leader_alpha.
struct Sensitivities {
    double psi = 0.0;
    double phi = 0.0;
};
Sensitivities sensitivities(const MarketParams& m, const AgentProfiles& profiles,
                            const PolicyUtility& u, double eta);

/// Constant compensation utility chi = max(0, sup_eta rho(eta)).
///
/// rho is accumulated by adaptive quadrature of the smooth integrand
/// delta(regulated) - delta(unregulated) + u(xi) phi(xi) over (eta_breve,
/// eta_max], which is rho's derivative wherever the policy is constant. The
/// policy itself switches at eta_breve, which adds a positive jump
/// f(eta_breve+) to rho that the smooth integrand cannot see; the jump is
/// added explicitly so that the participation lower bound c*(eta) >=
/// v^{-1}(f(eta)) holds on the whole regulated region (that bound is the
/// arbiter for this term; `form` records the decomposition). rho = 0 below
/// the threshold, so chi >= 0 holds before clamping too.
struct ChiResult {
    double chi = 0.0;
    double rho_sup = 0.0;         ///< sup of rho including the switch jump
    double rho_sup_smooth = 0.0;  ///< sup of the smooth cumulative form alone (diagnostic)
    double jump = 0.0;            ///< policy-switch jump f(eta_breve+) at the threshold
    double argmax_eta = 0.0;
    double quad_error = 0.0;
    double tail_bound = 0.0;
    std::string form;  ///< marker: which form determined chi
};
/// The default tol sits above the finite-difference noise floor of the
/// phi-bearing integrand (~1e-11 scaled by the squared risk-ordering gap);
/// tolerances below that floor exhaust the quadrature budget.
ChiResult chi(const MarketParams& m, const AgentProfiles& profiles, const PolicyUtility& u,
              const ThresholdResult& thr, double eta_max = 1.0, double tol = 1e-8);

/// Truth-telling compensation integral int_{eta_breve}^{eta} u(xi) psi(xi) dxi
/// (adaptive quadrature, absolute tolerance tol). Requires eta >= eta_breve
/// and follower_alpha < leader_alpha.
double ic_compensation_integral(const MarketParams& m, const AgentProfiles& profiles,
                                const PolicyUtility& u, const ThresholdResult& thr, double eta,
                                double tol = 1e-8);

/// Optimal compensation c*(eta) = v^{-1}(step * ic_integral + chi), where
/// step = 1 only in the regulated region.
double optimal_compensation(const MarketParams& m, const AgentProfiles& profiles,
                            const PolicyUtility& u, const CompensationUtility& v,
                            const ThresholdResult& thr, double chi_value, double eta);

/// Follower's final decision branch: lambda = eta - u(eta) in the regulated
/// region, lambda = eta otherwise.
FollowerSolution optimal_decision(const MarketParams& m, const AgentProfiles& profiles,
                                  const PolicyUtility& u, const ThresholdResult& thr, double eta);
double optimal_decision_ratio(const MarketParams& m, const AgentProfiles& profiles,
                              const PolicyUtility& u, const ThresholdResult& thr, double eta);

/// Expected terminal fund under the implemented policy minus the
/// intervention cost.
double regulator_objective(const MarketParams& m, const AgentProfiles& profiles,
                           const PolicyUtility& u, const CostSpec& cost,
                           const ThresholdResult& thr, double eta);

/// Scales applied to the compensation menu in verification runs; the
/// negative controls of the test suites tamper with these.
struct MenuTweak {
    double ic_scale = 1.0;    ///< scales the truth-telling integral inside v^{-1}
    double comp_scale = 1.0;  ///< scales the final monetary compensation
};

/// Participation check at true coefficient eta:
///   E phi(x_T) - eta delta(omega) + v(c*) >= E phi(xbar_T) - eta delta(pibar),
/// evaluated directly on both sides; `f_value` is the equivalent lower bound
/// in utility units (c* >= v^{-1}(f) iff slack >= 0).
struct IrReport {
    bool pass = false;
    double slack = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double f_value = 0.0;       ///< required compensation utility
    double comp_utility = 0.0;  ///< v(c*) actually granted
    double c_star = 0.0;
};
IrReport verify_ir(const MarketParams& m, const AgentProfiles& profiles, const PolicyUtility& u,
                   const CompensationUtility& v, const ThresholdResult& thr, double chi_value,
                   double eta, const MenuTweak& tweak = {});

/// Truth-telling check: the reporting follower's objective
///   E phi(x_T(report)) - eta * delta(omega(report)) + v(c*(report))
/// must attain its maximum over report_grid (subset of [0, eta]) at the
/// truthful report, within 1e-8.
struct IcReport {
    bool pass = false;
    double truthful_value = 0.0;
    double argmax_report = 0.0;
    double argmax_value = 0.0;
    double gap = 0.0;  ///< argmax_value - truthful_value (>0 means a profitable lie)
};
IcReport verify_ic(const MarketParams& m, const AgentProfiles& profiles, const PolicyUtility& u,
                   const CompensationUtility& v, const ThresholdResult& thr, double chi_value,
                   double eta, const std::vector<double>& report_grid,
                   const MenuTweak& tweak = {});

/// Everything the mechanism decides at one point, as a flat record.
struct MechanismResult {
    // Echoed inputs.
    double leader_alpha = 0.0;
    double follower_alpha = 0.0;
    double eta = 0.0;
    double kappa = 0.0;
    // Threshold block.
    double eta_breve = std::numeric_limits<double>::infinity();
    double gain_sup = 0.0;
    double monotone_prefix_end = 0.0;
    // Policy and compensation at eta.
    double q_star = 0.0;
    double lambda_star = 0.0;
    double psi = 0.0;
    double phi = 0.0;
    double ic_integral = 0.0;
    double chi = 0.0;
    double chi_jump = 0.0;
    double chi_smooth = 0.0;
    double chi_quad_error = 0.0;
    double chi_tail_bound = 0.0;
    std::string chi_form;
    double c_star = 0.0;
    // Follower branches.
    double ratio_star = 1.0;
    double ratio_unregulated = 1.0;
    double mu_star = 0.0;
    double mu_unregulated = 0.0;
    double residual_star = 0.0;
    double residual_unregulated = 0.0;
    double deviation_star = 0.0;
    double deviation_unregulated = 0.0;
    double expected_fund_star = 0.0;
    double expected_fund_unregulated = 0.0;
    double decision_T_star = 0.0;
    double decision_T_unregulated = 0.0;
    // Regulator's view.
    double gain = 0.0;
    double regulator_objective = 0.0;
};

/// Per-(profiles, u, kappa) work shared across eta: gain curve, threshold,
/// chi. Build once, evaluate many etas.
struct MechanismContext {
    GainCurve curve;
    ThresholdResult thr;
    ChiResult chi_res;
};
MechanismContext make_mechanism_context(const MarketParams& m, const AgentProfiles& profiles,
                                        const PolicyUtility& u, double kappa,
                                        double eta_max = 1.0, int grid_n = 257,
                                        double tol = 1e-8);

MechanismResult solve_mechanism_at(const MarketParams& m, const AgentProfiles& profiles,
                                   const PolicyUtility& u, const CompensationUtility& v,
                                   const CostSpec& cost, const MechanismContext& ctx,
                                   double eta);

/// Convenience: context + point solve in one call.
MechanismResult solve_mechanism(const MarketParams& m, const AgentProfiles& profiles,
                                const PolicyUtility& u, const CompensationUtility& v,
                                const CostSpec& cost, double eta);

}  // namespace herdreg
