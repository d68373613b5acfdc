// Acceptance gate: twelve end-to-end checks against the reference parameter
// set (T=50, r=0.04, nu=0.03, sigma=0.17, leader alpha 0.3, follower alpha
// 0.25, u(q)=0.9q, v(c)=c). Prints one [PASS]/[FAIL] line per criterion and
// exits with the number of failures.
//
// Criteria 8 and 11 contain sub-clauses that the implemented menu cannot
// satisfy by construction (see README, "Known acceptance gaps"): with the
// per-type compensation pinned to v^{-1}(step*integral + chi) and a single
// chi shared by every type, truth-telling near the intervention threshold
// and a zero membership constant are mutually exclusive with participation
// holding everywhere. Those clauses fail loudly here; nothing is relaxed to
// hide that.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "herdreg/experiments.hpp"
#include "oracles.hpp"

using namespace herdreg;

namespace {

const MarketParams kM{};
const AgentProfiles kP{};
const PolicyUtility kU = PolicyUtility::linear(0.9);
const CompensationUtility kV = CompensationUtility::linear(1.0);

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int num, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %02d %-34s %s\n", pass ? "PASS" : "FAIL", num, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

// ---------------------------------------------------------------- criteria

void c1_threshold_location() {
    const auto t0 = std::chrono::steady_clock::now();
    const ThresholdResult t = threshold(kM, kP, kU, 0.5);
    const double sec = seconds_since(t0);
    const bool pass =
        t.intervene_ever && t.eta_breve >= 0.0055 && t.eta_breve <= 0.0065 && sec < 5.0;
    report(1, "threshold-location", pass,
           fmt("eta_breve=%.6f in [0.0055,0.0065], %.2f s (limit 5 s)", t.eta_breve, sec));
}

void c2_critical_risk_coefficient() {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.sweep_axis = "alpha";
    cfg.sweep_min = 0.2;
    cfg.sweep_max = 0.35;
    cfg.sweep_n = 31;
    cfg.kappa_list = {0.5};
    const CaseResult res = run_case1(cfg);
    const double sec = seconds_since(t0);
    const bool defined = !res.summaries.empty() && res.summaries[0].critical_defined;
    const double crit = defined ? res.summaries[0].critical_value : 0.0;
    const bool pass = defined && crit >= 0.250 && crit <= 0.254 && sec < 30.0;
    report(2, "critical-risk-coefficient", pass,
           fmt("alpha_crit=%.6f in [0.250,0.254], %.1f s (limit 30 s)", crit, sec));
}

void c3_fixed_point_quality() {
    double worst = 0.0;
    for (double a : {0.2, 0.25, 0.3, 0.32, 0.35})
        for (double l : {0.0, 1e-4, 1e-3, 0.01, 0.1, 1.0})
            worst = std::max(worst, std::abs(solve_mu(kM, a, kP.leader_alpha, l).residual));
    const double ek = std::exp(-kM.merton_exponent());
    double limit_err = 0.0;
    for (double a : {0.2, 0.25, 0.35})
        limit_err = std::max(limit_err,
                             std::abs(solve_mu(kM, a, kP.leader_alpha, 0.0).mu - ek));
    for (double l : {1e-3, 0.01, 0.1})
        limit_err = std::max(
            limit_err, std::abs(solve_mu(kM, kP.leader_alpha, kP.leader_alpha, l).mu - ek));
    const bool pass = worst <= 1e-12 && limit_err <= 1e-12;
    report(3, "fixed-point-quality", pass,
           fmt("max residual %.1e (<=1e-12), exact-limit error %.1e (<=1e-12)", worst,
               limit_err));
}

void c4_deviation_quadrature() {
    double worst = 0.0;
    for (double a : {0.2, 0.25, 0.28, 0.32, 0.35})
        for (double l : {1e-4, 1e-3, 0.01, 0.1}) {
            const double ratio = solve_follower(kM, a, kP.leader_alpha, l).ratio;
            const double closed = proportional_deviation(ratio, kM, kP.leader_alpha);
            const double quad = oracles::deviation_simpson(ratio, kM, kP.leader_alpha, 1024);
            if (quad != 0.0) worst = std::max(worst, std::abs(closed - quad) / std::abs(quad));
        }
    report(4, "deviation-quadrature", worst <= 1e-8,
           fmt("worst relative gap %.2e over 20 points (<=1e-8)", worst));
}

void c5_simulation_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (double ratio : {1.0, 1.2}) {
        const SimResult r =
            simulate_terminal_fund(kM, kP, ratio, SimConfig{100000, 10000, 12345});
        const double mean_cf = oracles::fund_mean(kM, kP.leader_alpha, ratio);
        const double util_cf =
            oracles::utility_mean(kM, kP.follower_alpha, kP.leader_alpha, ratio);
        const double zm = (r.mean_terminal_fund - mean_cf) / r.std_error;
        const double zu = (r.mean_utility - util_cf) / r.utility_std_error;
        pass = pass && std::abs(zm) <= 3.0 && std::abs(zu) <= 3.0;
        detail += fmt("ratio %.1f: z_mean=%+.2f z_util=%+.2f; ", ratio, zm, zu);
    }
    const double sec = seconds_since(t0);
    pass = pass && sec < 60.0;
    report(5, "simulation-oracle", pass, detail + fmt("%.1f s (limit 60 s)", sec));
}

void c6_gain_shape() {
    double off_worst = 0.0;
    for (double a : {0.30, 0.32, 0.35}) {
        AgentProfiles p = kP;
        p.follower_alpha = a;
        for (double eta : {0.002, 0.006, 0.01})
            off_worst = std::max(off_worst, std::abs(economic_gain(kM, p, kU, eta)));
    }
    const ThresholdResult t = threshold(kM, kP, kU, 0.5);
    double min_gain = 0.0, worst_drop = 0.0, prev = -1.0;
    for (double eta : linspace(t.eta_breve + 1e-6, 0.01, 25)) {
        const double g = economic_gain(kM, kP, kU, eta);
        min_gain = std::min(min_gain, g);
        if (prev >= 0.0) worst_drop = std::min(worst_drop, g - prev);
        prev = g;
    }
    const bool pass = off_worst <= 1e-12 && min_gain >= -1e-12 && worst_drop >= -1e-10;
    report(6, "gain-shape", pass,
           fmt("|g| off-edge %.1e (<=1e-12); min g %.1e; worst step %.1e (>=-1e-10)",
               off_worst, min_gain, worst_drop));
}

void c7_threshold_cost_monotonicity() {
    const GainCurve curve = gain_curve(kM, kP, kU);
    bool pass = true;
    double prev = 0.0;
    std::string detail;
    for (double kap : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        const ThresholdResult t = threshold(kM, kP, kU, kap, curve);
        pass = pass && t.intervene_ever && t.eta_breve >= prev;
        detail += fmt("%.4f ", t.eta_breve);
        prev = t.eta_breve;
    }
    report(7, "threshold-cost-monotonicity", pass, "eta_breve(kappa): " + detail);
}

struct SuiteCounts {
    int ir_fail = 0, ic_fail = 0, n = 0;
    int control_ir_fail = 0, control_ic_fail = 0;
    double ic_fail_hi = 0.0;  // largest eta with an IC failure
};

SuiteCounts run_suites(double kappa) {
    const MechanismContext ctx = make_mechanism_context(kM, kP, kU, kappa);
    SuiteCounts sc;
    for (int i = 1; i <= 51; ++i) {
        const double eta = ctx.thr.eta_breve + (0.01 - ctx.thr.eta_breve) * i / 51.0;
        const std::vector<double> reports = linspace(0.0, eta, 41);
        ++sc.n;
        if (!verify_ir(kM, kP, kU, kV, ctx.thr, ctx.chi_res.chi, eta).pass) ++sc.ir_fail;
        if (!verify_ic(kM, kP, kU, kV, ctx.thr, ctx.chi_res.chi, eta, reports).pass) {
            ++sc.ic_fail;
            sc.ic_fail_hi = eta;
        }
        if (!verify_ir(kM, kP, kU, kV, ctx.thr, ctx.chi_res.chi, eta, MenuTweak{1.0, 0.0})
                 .pass)
            ++sc.control_ir_fail;
        if (!verify_ic(kM, kP, kU, kV, ctx.thr, ctx.chi_res.chi, eta, reports,
                       MenuTweak{0.5, 1.0})
                 .pass)
            ++sc.control_ic_fail;
    }
    return sc;
}

void c8_participation_truthtelling(const SuiteCounts& s0, const SuiteCounts& s5) {
    const bool controls = s0.control_ir_fail + s5.control_ir_fail > 0 &&
                          s0.control_ic_fail + s5.control_ic_fail > 0;
    const bool pass = s0.ir_fail == 0 && s5.ir_fail == 0 && s0.ic_fail == 0 &&
                      s5.ic_fail == 0 && controls;
    report(8, "participation-truthtelling", pass,
           fmt("IR %d/%d+%d/%d ok; IC kappa=0: %d/%d ok, kappa=0.5: %d/%d ok"
               " (fails below eta=%.5f); tampered menus caught: %s",
               s0.n - s0.ir_fail, s0.n, s5.n - s5.ir_fail, s5.n, s0.n - s0.ic_fail, s0.n,
               s5.n - s5.ic_fail, s5.n, s5.ic_fail_hi, controls ? "yes" : "NO"));
}

void c9_c10_sweep_checks(const CaseResult& c1, const CaseResult& c2, double eb_half) {
    // Criterion 9: all-or-nothing policy, branch matching the threshold rule.
    int bad_switch = 0, bad_branch = 0;
    auto check_rows = [&](const CaseResult& res, bool eta_axis) {
        for (const SweepRow& r : res.rows) {
            const double eta = eta_axis ? r.value : 0.01;
            const double alpha = eta_axis ? 0.25 : r.value;
            if (!(r.q_star == 0.0 || r.q_star == eta)) ++bad_switch;
            const bool should = alpha < kP.leader_alpha && eta > r.eta_breve;
            if (should != (r.q_star > 0.0)) ++bad_branch;
        }
    };
    check_rows(c1, false);
    check_rows(c2, true);
    report(9, "switch-structure", bad_switch == 0 && bad_branch == 0,
           fmt("%zu rows: %d off-switch values, %d branch mismatches",
               c1.rows.size() + c2.rows.size(), bad_switch, bad_branch));

    // Criterion 10: decision shapes along the herd-coefficient sweep.
    int bar_updrifts = 0, order_violations = 0;
    double reg_lo = 1e300, reg_hi = -1e300;
    const std::size_t half = c2.rows.size() / 2;
    for (std::size_t block = 0; block < 2; ++block) {
        for (std::size_t i = block * half; i < (block + 1) * half; ++i) {
            const SweepRow& r = c2.rows[i];
            if (i > block * half && r.pi_bar_T >= c2.rows[i - 1].pi_bar_T) ++bar_updrifts;
            if (r.pi_star_T < r.pi_bar_T - 1e-12) ++order_violations;
            if (r.q_star > 0.0 && r.value > eb_half) {
                reg_lo = std::min(reg_lo, r.pi_star_T);
                reg_hi = std::max(reg_hi, r.pi_star_T);
            }
        }
    }
    const double spread = (reg_hi - reg_lo) / (0.5 * (reg_hi + reg_lo));
    const bool pass = bar_updrifts == 0 && order_violations == 0 && spread < 0.02;
    report(10, "decision-shape", pass,
           fmt("unregulated decision strictly falls (%d exceptions); regulated spread "
               "%.3f%% (<2%%) above the paid threshold; ordering violations %d",
               bar_updrifts, 100.0 * spread, order_violations));
}

void c11_membership_constant(const MechanismContext& ctx5, const SuiteCounts& s0,
                             const SuiteCounts& s5) {
    const double chi_v = ctx5.chi_res.chi;
    // The participation lower bound c* >= v^{-1}(f) at every suite grid point
    // is folded into the IR verdicts above; re-derive the two explicit
    // sub-clauses here.
    const bool nonneg = chi_v >= 0.0;
    const bool lower_bound_everywhere = s0.ir_fail == 0 && s5.ir_fail == 0;
    const double money = kV.inverse(chi_v);
    const bool zero_at_reference = money <= 1e-6;
    report(11, "membership-constant", nonneg && lower_bound_everywhere && zero_at_reference,
           fmt("chi=%.6g >=0: %s; participation floor holds at all %d grid points: %s; "
               "v^{-1}(chi)=%.4g <=1e-6: %s",
               chi_v, nonneg ? "yes" : "NO", s0.n + s5.n,
               lower_bound_everywhere ? "yes" : "NO", money, zero_at_reference ? "yes" : "NO"));
}

void c12_determinism() {
    ExperimentConfig cfg;
    cfg.sweep_axis = "eta";
    cfg.sweep_min = 0.0;
    cfg.sweep_max = 0.01;
    cfg.sweep_n = 41;
    const std::string a = render_rows(run_case2(cfg).rows, "csv");
    const std::string b = render_rows(run_case2(cfg).rows, "csv");
    ExperimentConfig cfg1;
    cfg1.sweep_axis = "alpha";
    cfg1.sweep_min = 0.2;
    cfg1.sweep_max = 0.35;
    cfg1.sweep_n = 11;
    const std::string c = render_rows(run_case1(cfg1).rows, "csv");
    const std::string d = render_rows(run_case1(cfg1).rows, "csv");
    const SimResult s1 = simulate_terminal_fund(kM, kP, 1.2, SimConfig{20000, 500, 7});
    const SimResult s2 = simulate_terminal_fund(kM, kP, 1.2, SimConfig{20000, 500, 7});
    const bool pass = a == b && c == d && s1.mean_terminal_fund == s2.mean_terminal_fund &&
                      s1.std_error == s2.std_error;
    report(12, "determinism", pass,
           fmt("repeated sweeps byte-identical: %s; repeated simulation bit-identical: %s",
               (a == b && c == d) ? "yes" : "NO",
               (s1.mean_terminal_fund == s2.mean_terminal_fund) ? "yes" : "NO"));
}

}  // namespace

int main() {
    std::printf("acceptance gate: reference parameters, tolerances pinned in code\n");

    c1_threshold_location();
    c2_critical_risk_coefficient();
    c3_fixed_point_quality();
    c4_deviation_quadrature();
    c5_simulation_oracle();
    c6_gain_shape();
    c7_threshold_cost_monotonicity();

    const SuiteCounts s0 = run_suites(0.0);
    const SuiteCounts s5 = run_suites(0.5);
    c8_participation_truthtelling(s0, s5);

    ExperimentConfig case1_cfg;
    case1_cfg.sweep_axis = "alpha";
    case1_cfg.sweep_min = 0.2;
    case1_cfg.sweep_max = 0.35;
    case1_cfg.sweep_n = 151;
    const CaseResult c1 = run_case1(case1_cfg);
    ExperimentConfig case2_cfg;
    case2_cfg.sweep_axis = "eta";
    case2_cfg.sweep_min = 0.0;
    case2_cfg.sweep_max = 0.01;
    case2_cfg.sweep_n = 151;
    const CaseResult c2 = run_case2(case2_cfg);
    const MechanismContext ctx5 = make_mechanism_context(kM, kP, kU, 0.5);
    c9_c10_sweep_checks(c1, c2, ctx5.thr.eta_breve);
    c11_membership_constant(ctx5, s0, s5);
    c12_determinism();

    std::printf("%d/12 criteria pass\n", 12 - g_failures);
    if (g_failures > 0)
        std::printf(
            "expected standing failures: the truth-telling clause of 08 near the paid\n"
            "threshold and the zero-constant clause of 11; both stem from the single\n"
            "shared membership constant in the pinned menu (see README).\n");
    return g_failures;
}
