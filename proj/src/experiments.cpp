#include "herdreg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace herdreg {

namespace {

constexpr double kCriticalAlphaTol = 1e-7;

void require_valid(const ExperimentConfig& cfg) {
    const auto issues = cfg.validate();
    if (!issues.empty()) throw std::domain_error("config invalid: " + issues.front());
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[std::size_t(i)] = lo + (hi - lo) * double(i) / double(n - 1);
    out.front() = lo;
    out.back() = hi;
    return out;
}

/// Threshold as a function of the follower's risk coefficient (full curve
/// rebuild; the gain curve depends on alpha).
ThresholdResult threshold_at_alpha(const ExperimentConfig& cfg, const PolicyUtility& u,
                                   double alpha, double kappa) {
    AgentProfiles p = cfg.profiles;
    p.follower_alpha = alpha;
    return threshold(cfg.market, p, u, kappa);
}

}  // namespace

PointResult run_point(const ExperimentConfig& cfg, bool with_sim) {
    require_valid(cfg);
    const PolicyUtility u = cfg.policy_utility();
    const CompensationUtility v = cfg.compensation_utility();

    PointResult p;
    p.mech = solve_mechanism(cfg.market, cfg.profiles, u, v, cfg.cost(), cfg.profiles.eta);
    p.star = solve_follower(cfg.market, cfg.profiles.follower_alpha, cfg.profiles.leader_alpha,
                            p.mech.lambda_star);
    p.unregulated = solve_follower(cfg.market, cfg.profiles.follower_alpha,
                                   cfg.profiles.leader_alpha, cfg.profiles.eta);
    if (with_sim) {
        SimConfig sc;
        sc.seed = cfg.seed;
        p.sim = simulate_terminal_fund(cfg.market, cfg.profiles, p.star.ratio, sc);
        p.has_sim = true;
    }
    return p;
}

CaseResult run_case1(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    if (c.sweep_axis != "alpha") {
        c.sweep_axis = "alpha";
        c.sweep_min = 0.2;
        c.sweep_max = 0.35;
    }
    require_valid(c);
    const PolicyUtility u = c.policy_utility();
    const CompensationUtility v = c.compensation_utility();
    const double eta = c.profiles.eta;
    const std::vector<double> alphas = linspace(c.sweep_min, c.sweep_max, c.sweep_n);

    CaseResult out;
    out.rows.reserve(std::size_t(c.sweep_n) * c.kappa_list.size());
    for (double kappa : c.kappa_list) {
        // Critical risk coefficient: the threshold curve eta_breve(alpha) is
        // nondecreasing in alpha (less risk-tolerant followers gain less from
        // regulation), and jumps to +inf at alpha = leader_alpha. Bisect the
        // crossing eta_breve(alpha) = eta on [sweep_min, leader_alpha].
        CaseSummary s;
        s.kappa = kappa;
        {
            auto above = [&](double a) {
                const ThresholdResult t = threshold_at_alpha(c, u, a, kappa);
                return !t.intervene_ever || t.eta_breve >= eta;
            };
            double lo = c.sweep_min, hi = c.profiles.leader_alpha;
            if (!above(lo) && above(hi)) {
                while (hi - lo > kCriticalAlphaTol) {
                    const double mid = 0.5 * (lo + hi);
                    (above(mid) ? hi : lo) = mid;
                }
                s.critical_defined = true;
                s.critical_value = 0.5 * (lo + hi);
            }
        }
        out.summaries.push_back(s);

        for (double alpha : alphas) {
            AgentProfiles p = c.profiles;
            p.follower_alpha = alpha;
            const MechanismContext ctx = make_mechanism_context(c.market, p, u, kappa);
            const MechanismResult r =
                solve_mechanism_at(c.market, p, u, v, CostSpec{kappa}, ctx, eta);
            SweepRow row;
            row.kappa = kappa;
            row.value = alpha;
            row.eta_breve = r.eta_breve;
            row.q_star = r.q_star;
            row.c_star = r.c_star;
            row.pi_star_T = r.decision_T_star;
            row.pi_bar_T = r.decision_T_unregulated;
            row.gain = r.gain;
            row.region = alpha >= c.profiles.leader_alpha ? "i" : (r.q_star > 0.0 ? "iii" : "ii");
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

CaseResult run_case2(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    if (c.sweep_axis != "eta") {
        c.sweep_axis = "eta";
        c.sweep_min = 0.0;
        c.sweep_max = 0.01;
    }
    require_valid(c);
    const PolicyUtility u = c.policy_utility();
    const CompensationUtility v = c.compensation_utility();
    const std::vector<double> etas = linspace(c.sweep_min, c.sweep_max, c.sweep_n);

    CaseResult out;
    out.rows.reserve(std::size_t(c.sweep_n) * c.kappa_list.size());
    for (double kappa : c.kappa_list) {
        // One context serves the whole eta sweep: the gain curve and the
        // threshold depend on (market, profiles, u, kappa) only.
        const MechanismContext ctx = make_mechanism_context(c.market, c.profiles, u, kappa);
        CaseSummary s;
        s.kappa = kappa;
        s.critical_defined = ctx.thr.intervene_ever;
        s.critical_value = ctx.thr.eta_breve;

        double pi_min = std::numeric_limits<double>::infinity();
        double pi_max = -std::numeric_limits<double>::infinity();
        for (double eta : etas) {
            const MechanismResult r =
                solve_mechanism_at(c.market, c.profiles, u, v, CostSpec{kappa}, ctx, eta);
            SweepRow row;
            row.kappa = kappa;
            row.value = eta;
            row.eta_breve = r.eta_breve;
            row.q_star = r.q_star;
            row.c_star = r.c_star;
            row.pi_star_T = r.decision_T_star;
            row.pi_bar_T = r.decision_T_unregulated;
            row.gain = r.gain;
            row.region = r.q_star > 0.0 ? "i" : "ii";
            if (r.q_star > 0.0) {
                pi_min = std::min(pi_min, row.pi_star_T);
                pi_max = std::max(pi_max, row.pi_star_T);
            }
            out.rows.push_back(std::move(row));
        }
        if (pi_max >= pi_min && pi_max + pi_min != 0.0)
            s.regulated_variation = (pi_max - pi_min) / (0.5 * (pi_max + pi_min));
        out.summaries.push_back(s);
    }
    return out;
}

std::string format_g12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

const char* const kCsvHeader = "kappa,value,eta_breve,q_star,c_star,pi_star_T,pi_bar_T,gain,region";

std::string json_number(double x) {
    // JSON has no infinity literal; thresholds that never trigger serialize
    // as the string "inf".
    if (!std::isfinite(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
    return format_g12(x);
}

}  // namespace

std::string render_rows(const std::vector<SweepRow>& table, const std::string& format) {
    if (table.empty()) throw std::runtime_error("render_rows: empty table");
    std::string out;
    if (format == "csv") {
        out += kCsvHeader;
        out += '\n';
        for (const SweepRow& r : table) {
            out += format_g12(r.kappa) + ',' + format_g12(r.value) + ',' +
                   format_g12(r.eta_breve) + ',' + format_g12(r.q_star) + ',' +
                   format_g12(r.c_star) + ',' + format_g12(r.pi_star_T) + ',' +
                   format_g12(r.pi_bar_T) + ',' + format_g12(r.gain) + ',' + r.region + '\n';
        }
        return out;
    }
    if (format == "json") {
        out += "[\n";
        for (std::size_t i = 0; i < table.size(); ++i) {
            const SweepRow& r = table[i];
            out += "  {\"kappa\": " + json_number(r.kappa) + ", \"value\": " +
                   json_number(r.value) + ", \"eta_breve\": " + json_number(r.eta_breve) +
                   ", \"q_star\": " + json_number(r.q_star) + ", \"c_star\": " +
                   json_number(r.c_star) + ", \"pi_star_T\": " + json_number(r.pi_star_T) +
                   ", \"pi_bar_T\": " + json_number(r.pi_bar_T) + ", \"gain\": " +
                   json_number(r.gain) + ", \"region\": \"" + r.region + "\"}";
            out += i + 1 < table.size() ? ",\n" : "\n";
        }
        out += "]\n";
        return out;
    }
    throw std::runtime_error("render_rows: unknown format '" + format + "'");
}

void emit(const std::vector<SweepRow>& table, const std::string& format,
          const std::string& path) {
    const std::string body = render_rows(table, format);
    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw std::runtime_error("emit: cannot open '" + path + "' for writing");
    outf.write(body.data(), std::streamsize(body.size()));
    if (!outf) throw std::runtime_error("emit: write failed for '" + path + "'");
}

std::vector<SweepRow> parse_rows_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line) || line != kCsvHeader)
        throw std::runtime_error("parse_rows_csv: bad header");
    std::vector<SweepRow> out;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 9)
            throw std::runtime_error("parse_rows_csv: expected 9 fields, got line '" + line + "'");
        auto num = [&](int i) {
            char* end = nullptr;
            const double x = std::strtod(fields[std::size_t(i)].c_str(), &end);
            if (end == fields[std::size_t(i)].c_str())
                throw std::runtime_error("parse_rows_csv: bad number '" + fields[std::size_t(i)] +
                                         "'");
            return x;
        };
        SweepRow r;
        r.kappa = num(0);
        r.value = num(1);
        r.eta_breve = num(2);
        r.q_star = num(3);
        r.c_star = num(4);
        r.pi_star_T = num(5);
        r.pi_bar_T = num(6);
        r.gain = num(7);
        r.region = fields[8];
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> flat_record(const PointResult& p) {
    std::vector<std::pair<std::string, std::string>> kv;
    auto add = [&](const char* k, double x) { kv.emplace_back(k, format_g12(x)); };
    const MechanismResult& m = p.mech;
    add("leader_alpha", m.leader_alpha);
    add("follower_alpha", m.follower_alpha);
    add("eta", m.eta);
    add("kappa", m.kappa);
    add("eta_breve", m.eta_breve);
    add("gain_sup", m.gain_sup);
    add("monotone_prefix_end", m.monotone_prefix_end);
    add("q_star", m.q_star);
    add("lambda_star", m.lambda_star);
    add("psi", m.psi);
    add("phi", m.phi);
    add("ic_integral", m.ic_integral);
    add("chi", m.chi);
    add("chi_jump", m.chi_jump);
    add("chi_smooth", m.chi_smooth);
    add("chi_quad_error", m.chi_quad_error);
    add("chi_tail_bound", m.chi_tail_bound);
    kv.emplace_back("chi_form", m.chi_form);
    add("c_star", m.c_star);
    add("ratio_star", m.ratio_star);
    add("ratio_unregulated", m.ratio_unregulated);
    add("mu_star", m.mu_star);
    add("mu_unregulated", m.mu_unregulated);
    add("residual_star", m.residual_star);
    add("residual_unregulated", m.residual_unregulated);
    add("deviation_star", m.deviation_star);
    add("deviation_unregulated", m.deviation_unregulated);
    add("expected_fund_star", m.expected_fund_star);
    add("expected_fund_unregulated", m.expected_fund_unregulated);
    add("decision_T_star", m.decision_T_star);
    add("decision_T_unregulated", m.decision_T_unregulated);
    add("gain", m.gain);
    add("regulator_objective", m.regulator_objective);
    add("follower_expected_utility_star", p.star.expected_utility);
    add("follower_expected_utility_unregulated", p.unregulated.expected_utility);
    add("fixed_point_iterations_star", double(p.star.iterations));
    add("fixed_point_iterations_unregulated", double(p.unregulated.iterations));
    if (p.has_sim) {
        add("sim_mean_terminal_fund", p.sim.mean_terminal_fund);
        add("sim_std_error", p.sim.std_error);
        add("sim_mean_utility", p.sim.mean_utility);
        add("sim_utility_std_error", p.sim.utility_std_error);
    }
    return kv;
}

}  // namespace herdreg
