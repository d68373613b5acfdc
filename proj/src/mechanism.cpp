#include "herdreg/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "herdreg/quadrature.hpp"

namespace herdreg {

namespace {

constexpr double kThresholdEtaTol = 1e-9;  // root tolerance; also the tie band at eta_breve
constexpr double kIcTol = 1e-8;            // truthful report must be within this of the max
constexpr double kIrTol = 1e-8;

bool policy_active(const AgentProfiles& p) { return p.follower_alpha < p.leader_alpha; }

bool regulated(const AgentProfiles& p, const ThresholdResult& thr, double eta) {
    return policy_active(p) && thr.intervene_ever && eta > thr.eta_breve + kThresholdEtaTol;
}

/// Effective coefficient of the fully regulated point.
double regulated_lambda(const PolicyUtility& u, double eta) { return eta - u(eta); }

/// d delta / d lambda by central differences with a Richardson half-step
/// consistency check; one-sided at the boundary.
double deviation_slope(const MarketParams& m, const AgentProfiles& p, double lambda) {
    const double h = 1e-6 * std::max(1.0, lambda);
    auto dev = [&](double l) {
        return solve_follower(m, p.follower_alpha, p.leader_alpha, l).deviation;
    };
    if (lambda - h < 0.0) {
        // Second-order one-sided difference at the lambda >= 0 boundary.
        return (-3.0 * dev(lambda) + 4.0 * dev(lambda + h) - dev(lambda + 2.0 * h)) / (2.0 * h);
    }
    const double s1 = (dev(lambda + h) - dev(lambda - h)) / (2.0 * h);
    const double s2 = (dev(lambda + 0.5 * h) - dev(lambda - 0.5 * h)) / h;
    if (std::abs(s1 - s2) > 1e-3 * std::max(1.0, std::abs(s2)))
        throw SolverError("deviation slope: half-step check failed (derivative unreliable)",
                          s1 - s2);
    return (4.0 * s2 - s1) / 3.0;  // Richardson extrapolation of the pair
}

/// Required compensation utility f(eta): the follower's utility loss from
/// accepting the full policy q = eta relative to staying unregulated, both
/// charged at the true coefficient eta.
double participation_bound(const MarketParams& m, const AgentProfiles& p, const PolicyUtility& u,
                           double eta) {
    const FollowerSolution reg = solve_follower(m, p.follower_alpha, p.leader_alpha,
                                                regulated_lambda(u, eta));
    const FollowerSolution unreg = solve_follower(m, p.follower_alpha, p.leader_alpha, eta);
    return (reg.mu - unreg.mu) / p.follower_alpha +
           eta * (reg.deviation - unreg.deviation);
}

}  // namespace

double economic_gain(const MarketParams& m, const AgentProfiles& profiles,
                     const PolicyUtility& u, double eta) {
    if (!(eta >= 0.0)) throw std::domain_error("economic_gain: eta must be >= 0");
    if (!policy_active(profiles) || eta == 0.0) return 0.0;
    const double a = profiles.follower_alpha, la = profiles.leader_alpha;
    const FollowerSolution reg = solve_follower(m, a, la, regulated_lambda(u, eta));
    const FollowerSolution unreg = solve_follower(m, a, la, eta);
    return reg.expected_terminal_fund - unreg.expected_terminal_fund;
}

GainCurve gain_curve(const MarketParams& m, const AgentProfiles& profiles,
                     const PolicyUtility& u, double eta_max, int grid_n) {
    if (!(eta_max > 0.0)) throw std::domain_error("gain_curve: eta_max must be > 0");
    if (grid_n < 64) throw std::domain_error("gain_curve: grid_n must be >= 64");

    GainCurve c;
    c.eta.resize(grid_n);
    c.gain.resize(grid_n);
    const double lo = eta_max * 1e-7;
    for (int i = 0; i < grid_n; ++i) {
        c.eta[i] = lo * std::pow(eta_max / lo, double(i) / (grid_n - 1));
        c.gain[i] = economic_gain(m, profiles, u, c.eta[i]);
    }
    c.eta.back() = eta_max;  // guard against pow() drift at the right endpoint

    std::size_t pre = 1;
    while (pre < c.eta.size() &&
           c.gain[pre] >= c.gain[pre - 1] - 1e-11 * std::max(1.0, std::abs(c.gain[pre - 1])))
        ++pre;
    c.monotone_prefix = pre;

    std::size_t best = 0;
    for (std::size_t i = 1; i < c.gain.size(); ++i)
        if (c.gain[i] > c.gain[best]) best = i;
    c.sup_gain = c.gain[best];
    c.sup_arg = c.eta[best];

    if (policy_active(profiles)) {
        // Golden-section refinement on the bracket around the grid argmax.
        const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = best > 0 ? c.eta[best - 1] : 0.0;
        double b = best + 1 < c.eta.size() ? c.eta[best + 1] : c.eta[best];
        double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
        double f1 = economic_gain(m, profiles, u, x1), f2 = economic_gain(m, profiles, u, x2);
        for (int it = 0; it < 40 && (b - a) > 1e-12 * std::max(1.0, b); ++it) {
            if (f1 < f2) {
                a = x1; x1 = x2; f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = economic_gain(m, profiles, u, x2);
            } else {
                b = x2; x2 = x1; f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = economic_gain(m, profiles, u, x1);
            }
        }
        const double xm = 0.5 * (a + b), fm = economic_gain(m, profiles, u, xm);
        if (fm > c.sup_gain) {
            c.sup_gain = fm;
            c.sup_arg = xm;
        }
    }
    return c;
}

double gain_sup(const MarketParams& m, const AgentProfiles& profiles, const PolicyUtility& u,
                double eta_max, int grid_n) {
    if (!policy_active(profiles)) return 0.0;
    return gain_curve(m, profiles, u, eta_max, grid_n).sup_gain;
}

ThresholdResult threshold(const MarketParams& m, const AgentProfiles& profiles,
                          const PolicyUtility& u, double kappa, const GainCurve& curve) {
    if (!(kappa >= 0.0)) throw std::domain_error("threshold: kappa must be >= 0");

    ThresholdResult r;
    r.kappa = kappa;
    r.gain_sup = curve.sup_gain;
    r.monotone_prefix_end =
        curve.monotone_prefix > 0 ? curve.eta[curve.monotone_prefix - 1] : 0.0;

    if (!policy_active(profiles)) return r;  // no intervention ever
    if (kappa == 0.0) {
        r.intervene_ever = true;
        r.eta_breve = 0.0;
        return r;
    }
    if (kappa > curve.sup_gain) return r;  // cost outside the attainable gain range
    r.intervene_ever = true;

    // Smallest crossing g(eta) = kappa: first grid segment whose right end
    // reaches kappa ([0, eta_0] counts, with g(0) = 0), bisected to 1e-9.
    double lo = 0.0, hi = curve.eta.front();
    bool found = curve.gain.front() >= kappa;
    std::size_t right = 0;
    if (!found) {
        for (std::size_t i = 0; i + 1 < curve.eta.size(); ++i) {
            if (curve.gain[i] < kappa && curve.gain[i + 1] >= kappa) {
                lo = curve.eta[i];
                hi = curve.eta[i + 1];
                right = i + 1;
                found = true;
                break;
            }
        }
    }
    if (!found) {
        // sup_gain >= kappa only between grid nodes near the refined maximum;
        // walk left until the gain drops below kappa to obtain a bracket.
        hi = curve.sup_arg;
        lo = 0.5 * hi;
        while (lo > 0.0 && economic_gain(m, profiles, u, lo) >= kappa) {
            hi = lo;
            lo *= 0.5;
        }
        right = curve.eta.size();
    }
    r.crossing_in_prefix = right < curve.monotone_prefix;

    while (hi - lo > kThresholdEtaTol) {
        const double mid = 0.5 * (lo + hi);
        if (economic_gain(m, profiles, u, mid) < kappa)
            lo = mid;
        else
            hi = mid;
    }
    r.eta_breve = 0.5 * (lo + hi);
    return r;
}

ThresholdResult threshold(const MarketParams& m, const AgentProfiles& profiles,
                          const PolicyUtility& u, double kappa, double eta_max, int grid_n) {
    return threshold(m, profiles, u, kappa, gain_curve(m, profiles, u, eta_max, grid_n));
}

double optimal_policy(const AgentProfiles& profiles, const ThresholdResult& thr, double eta) {
    if (!(eta >= 0.0)) throw std::domain_error("optimal_policy: eta must be >= 0");
    return regulated(profiles, thr, eta) ? eta : 0.0;
}

Sensitivities sensitivities(const MarketParams& m, const AgentProfiles& profiles,
                            const PolicyUtility& u, double eta) {
    if (!policy_active(profiles)) return {};
    const double lambda = regulated_lambda(u, eta);
    const double slope = deviation_slope(m, profiles, lambda);
    return {-u.derivative(eta) * slope, slope};
}

ChiResult chi(const MarketParams& m, const AgentProfiles& profiles, const PolicyUtility& u,
              const ThresholdResult& thr, double eta_max, double tol) {
    if (!(tol > 0.0)) throw std::domain_error("chi: tol must be > 0");

    ChiResult res;
    if (!policy_active(profiles)) {
        res.form = "inactive";
        return res;
    }
    if (!thr.intervene_ever) {
        res.form = "no-intervention";
        return res;
    }
    const double eb = thr.eta_breve;
    if (eb >= eta_max) {
        res.form = "threshold-at-range-end";
        return res;
    }

    // rho'(xi) on the regulated region: delta gap plus u * phi.
    auto integrand = [&](double xi) {
        const double a = profiles.follower_alpha, la = profiles.leader_alpha;
        const FollowerSolution reg = solve_follower(m, a, la, regulated_lambda(u, xi));
        const FollowerSolution unreg = solve_follower(m, a, la, xi);
        const double phi = deviation_slope(m, profiles, regulated_lambda(u, xi));
        return reg.deviation - unreg.deviation + u(xi) * phi;
    };

    // Policy switch at eta_breve: rho jumps by the participation gap of the
    // type at the threshold.
    res.jump = participation_bound(m, profiles, u, eb);

    // Cumulative quadrature on geometrically growing offsets from the
    // threshold; dense near eb where rho moves fastest.
    const double span = eta_max - eb;
    const double off0 = std::max(span * 1e-9, 1e-15);
    std::vector<double> nodes{eb};
    for (double off = off0; off < span; off *= 4.0) nodes.push_back(eb + off);
    nodes.push_back(eta_max);

    double cum = 0.0, cum_err = 0.0;
    double best_smooth = 0.0, best_rho = std::max(0.0, res.jump);
    res.argmax_eta = eb;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const QuadratureResult q = adaptive_simpson(integrand, nodes[i], nodes[i + 1], tol);
        cum += q.value;
        cum_err += q.error_estimate;
        if (cum > best_smooth) best_smooth = cum;
        if (res.jump + cum > best_rho) {
            best_rho = res.jump + cum;
            res.argmax_eta = nodes[i + 1];
        }
    }
    res.rho_sup_smooth = best_smooth;
    res.rho_sup = best_rho;
    res.chi = std::max(0.0, best_rho);
    res.quad_error = cum_err;
    // O(eta^-2) decay of the integrand: the tail beyond eta_max is bounded by
    // |integrand(eta_max)| * eta_max.
    res.tail_bound = std::abs(integrand(eta_max)) * eta_max;
    res.form = res.jump > best_smooth ? "switch-jump" : "smooth-integrand";
    return res;
}

double ic_compensation_integral(const MarketParams& m, const AgentProfiles& profiles,
                                const PolicyUtility& u, const ThresholdResult& thr, double eta,
                                double tol) {
    if (!policy_active(profiles))
        throw std::domain_error("ic_compensation_integral: policy inactive (alpha >= leader's)");
    if (!thr.intervene_ever || !(eta >= thr.eta_breve))
        throw std::domain_error("ic_compensation_integral: eta below threshold");
    if (eta == thr.eta_breve) return 0.0;

    auto integrand = [&](double xi) {
        const double phi = deviation_slope(m, profiles, regulated_lambda(u, xi));
        return u(xi) * (-u.derivative(xi) * phi);
    };
    return adaptive_simpson(integrand, thr.eta_breve, eta, tol).value;
}

double optimal_compensation(const MarketParams& m, const AgentProfiles& profiles,
                            const PolicyUtility& u, const CompensationUtility& v,
                            const ThresholdResult& thr, double chi_value, double eta) {
    double arg = chi_value;
    if (regulated(profiles, thr, eta))
        arg += ic_compensation_integral(m, profiles, u, thr, eta);
    return v.inverse(std::max(0.0, arg));
}

FollowerSolution optimal_decision(const MarketParams& m, const AgentProfiles& profiles,
                                  const PolicyUtility& u, const ThresholdResult& thr,
                                  double eta) {
    const double lambda = regulated(profiles, thr, eta) ? regulated_lambda(u, eta) : eta;
    return solve_follower(m, profiles.follower_alpha, profiles.leader_alpha, lambda);
}

double optimal_decision_ratio(const MarketParams& m, const AgentProfiles& profiles,
                              const PolicyUtility& u, const ThresholdResult& thr, double eta) {
    return optimal_decision(m, profiles, u, thr, eta).ratio;
}

double regulator_objective(const MarketParams& m, const AgentProfiles& profiles,
                           const PolicyUtility& u, const CostSpec& cost,
                           const ThresholdResult& thr, double eta) {
    const double q = optimal_policy(profiles, thr, eta);
    return optimal_decision(m, profiles, u, thr, eta).expected_terminal_fund - cost(q);
}

IrReport verify_ir(const MarketParams& m, const AgentProfiles& profiles, const PolicyUtility& u,
                   const CompensationUtility& v, const ThresholdResult& thr, double chi_value,
                   double eta, const MenuTweak& tweak) {
    IrReport rep;
    const double a = profiles.follower_alpha, la = profiles.leader_alpha;

    double menu_arg = chi_value;
    double lambda = eta;
    if (regulated(profiles, thr, eta)) {
        menu_arg += tweak.ic_scale * ic_compensation_integral(m, profiles, u, thr, eta);
        lambda = regulated_lambda(u, eta);
    }
    rep.c_star = tweak.comp_scale * v.inverse(std::max(0.0, menu_arg));
    rep.comp_utility = v(rep.c_star);

    const FollowerSolution accept = solve_follower(m, a, la, lambda);
    const FollowerSolution walk = solve_follower(m, a, la, eta);
    rep.lhs = accept.expected_utility - eta * accept.deviation + rep.comp_utility;
    rep.rhs = walk.expected_utility - eta * walk.deviation;
    rep.slack = rep.lhs - rep.rhs;
    rep.f_value = regulated(profiles, thr, eta) ? participation_bound(m, profiles, u, eta) : 0.0;
    // Equivalent lower-bound form: compensation must cover the participation
    // gap directly, c* >= v^{-1}(max(0, f)).
    const double floor_c = v.inverse(std::max(0.0, rep.f_value));
    rep.pass = rep.slack >= -kIrTol && rep.c_star >= floor_c - kIrTol;
    return rep;
}

IcReport verify_ic(const MarketParams& m, const AgentProfiles& profiles, const PolicyUtility& u,
                   const CompensationUtility& v, const ThresholdResult& thr, double chi_value,
                   double eta, const std::vector<double>& report_grid, const MenuTweak& tweak) {
    IcReport rep;
    const double a = profiles.follower_alpha, la = profiles.leader_alpha;

    std::vector<double> reports = report_grid;
    bool has_truth = false;
    for (double r : reports) has_truth = has_truth || r == eta;
    if (!has_truth) reports.push_back(eta);
    std::sort(reports.begin(), reports.end());
    for (double r : reports)
        if (!(r >= 0.0) || r > eta + 1e-12)
            throw std::domain_error("verify_ic: reports must lie in [0, eta]");

    // The reporting objective charges the deviation at the TRUE coefficient;
    // the response itself is solved at the effective coefficient implied by
    // the reported type's policy. Compensation integrals accumulate segment
    // by segment along the sorted grid (quadrature additivity).
    double cum = 0.0;
    double prev = thr.eta_breve;
    auto integrand = [&](double xi) {
        const double phi = deviation_slope(m, profiles, regulated_lambda(u, xi));
        return u(xi) * (-u.derivative(xi) * phi);
    };

    double best = -std::numeric_limits<double>::infinity();
    double best_report = 0.0;
    double truthful = 0.0;
    for (double report : reports) {
        double menu_arg = chi_value;
        double lambda = eta;
        if (regulated(profiles, thr, report)) {
            cum += adaptive_simpson(integrand, prev, report, 1e-8).value;
            prev = report;
            menu_arg += tweak.ic_scale * cum;
            lambda = eta - u(report);
        }
        const double c = tweak.comp_scale * v.inverse(std::max(0.0, menu_arg));
        const FollowerSolution sol = solve_follower(m, a, la, lambda);
        const double value = sol.expected_utility - eta * sol.deviation + v(c);
        if (value > best) {
            best = value;
            best_report = report;
        }
        if (report == eta) truthful = value;
    }
    rep.truthful_value = truthful;
    rep.argmax_value = best;
    rep.argmax_report = best_report;
    rep.gap = best - truthful;
    rep.pass = rep.gap <= kIcTol;
    return rep;
}

MechanismContext make_mechanism_context(const MarketParams& m, const AgentProfiles& profiles,
                                        const PolicyUtility& u, double kappa, double eta_max,
                                        int grid_n, double tol) {
    MechanismContext ctx;
    ctx.curve = gain_curve(m, profiles, u, eta_max, grid_n);
    ctx.thr = threshold(m, profiles, u, kappa, ctx.curve);
    ctx.chi_res = chi(m, profiles, u, ctx.thr, eta_max, tol);
    return ctx;
}

MechanismResult solve_mechanism_at(const MarketParams& m, const AgentProfiles& profiles,
                                   const PolicyUtility& u, const CompensationUtility& v,
                                   const CostSpec& cost, const MechanismContext& ctx,
                                   double eta) {
    MechanismResult r;
    r.leader_alpha = profiles.leader_alpha;
    r.follower_alpha = profiles.follower_alpha;
    r.eta = eta;
    r.kappa = cost.kappa;
    r.eta_breve = ctx.thr.eta_breve;
    r.gain_sup = ctx.thr.gain_sup;
    r.monotone_prefix_end = ctx.thr.monotone_prefix_end;

    r.chi = ctx.chi_res.chi;
    r.chi_jump = ctx.chi_res.jump;
    r.chi_smooth = ctx.chi_res.rho_sup_smooth;
    r.chi_quad_error = ctx.chi_res.quad_error;
    r.chi_tail_bound = ctx.chi_res.tail_bound;
    r.chi_form = ctx.chi_res.form;

    r.q_star = optimal_policy(profiles, ctx.thr, eta);
    const bool reg = r.q_star > 0.0;
    r.lambda_star = eta - u(r.q_star);

    const FollowerSolution star = solve_follower(m, profiles.follower_alpha,
                                                 profiles.leader_alpha, r.lambda_star);
    const FollowerSolution unreg = solve_follower(m, profiles.follower_alpha,
                                                  profiles.leader_alpha, eta);
    r.ratio_star = star.ratio;
    r.ratio_unregulated = unreg.ratio;
    r.mu_star = star.mu;
    r.mu_unregulated = unreg.mu;
    r.residual_star = star.residual;
    r.residual_unregulated = unreg.residual;
    r.deviation_star = star.deviation;
    r.deviation_unregulated = unreg.deviation;
    r.expected_fund_star = star.expected_terminal_fund;
    r.expected_fund_unregulated = unreg.expected_terminal_fund;
    r.decision_T_star = decision_at_time(star, m, profiles.leader_alpha, m.T);
    r.decision_T_unregulated = decision_at_time(unreg, m, profiles.leader_alpha, m.T);

    if (reg) {
        const Sensitivities s = sensitivities(m, profiles, u, eta);
        r.psi = s.psi;
        r.phi = s.phi;
        r.ic_integral = ic_compensation_integral(m, profiles, u, ctx.thr, eta);
    }
    r.c_star = v.inverse(std::max(0.0, (reg ? r.ic_integral : 0.0) + r.chi));
    r.gain = economic_gain(m, profiles, u, eta);
    r.regulator_objective = r.expected_fund_star - cost(r.q_star);
    return r;
}

MechanismResult solve_mechanism(const MarketParams& m, const AgentProfiles& profiles,
                                const PolicyUtility& u, const CompensationUtility& v,
                                const CostSpec& cost, double eta) {
    const MechanismContext ctx = make_mechanism_context(m, profiles, u, cost.kappa);
    return solve_mechanism_at(m, profiles, u, v, cost, ctx, eta);
}

}  // namespace herdreg
