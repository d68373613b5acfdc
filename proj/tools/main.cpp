#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "herdreg/config.hpp"
#include "herdreg/experiments.hpp"
#include "herdreg/market.hpp"
#include "herdreg/mechanism.hpp"
#include "herdreg/montecarlo.hpp"

namespace {

using herdreg::ExperimentConfig;

/// Key=value CLI overrides share the config-file parser so that flag and file
/// semantics (and error messages) cannot drift apart.
struct Overrides {
    std::vector<std::pair<std::string, std::string>> kv;

    void add_flags(CLI::App& app) {
        static const char* const keys[] = {"r",      "nu",        "sigma",     "T",
                                           "leader_alpha", "follower_alpha", "eta",
                                           "kappa",  "u_slope",   "v_slope",   "seed",
                                           "sweep_axis",   "sweep_min", "sweep_max",
                                           "sweep_n",      "kappa_list"};
        for (const char* key : keys) {
            auto cb = [this, key](const std::string& v) { kv.emplace_back(key, v); };
            app.add_option_function<std::string>(std::string("--") + key, cb,
                                                 std::string("override config key ") + key);
        }
    }

    void apply(ExperimentConfig& cfg) const {
        for (const auto& [k, v] : kv) herdreg::apply_key(cfg, k, v);
    }
};

bool looks_numeric(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return false;
    // JSON has no literal for these.
    return s.find("inf") == std::string::npos && s.find("nan") == std::string::npos;
}

std::string record_to_json(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string out = "{\n";
    for (std::size_t i = 0; i < kv.size(); ++i) {
        out += "  \"" + kv[i].first + "\": ";
        out += looks_numeric(kv[i].second) ? kv[i].second : '"' + kv[i].second + '"';
        out += i + 1 < kv.size() ? ",\n" : "\n";
    }
    out += "}\n";
    return out;
}

std::string record_to_csv(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string out = "key,value\n";
    for (const auto& [k, v] : kv) out += k + ',' + v + '\n';
    return out;
}

void write_or_print(const std::string& body, const std::string& out_dir,
                    const std::string& name) {
    if (out_dir.empty()) {
        std::cout << body;
        return;
    }
    const std::string path = out_dir + "/" + name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f.write(body.data(), std::streamsize(body.size()));
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
    std::cout << "wrote " << path << "\n";
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[std::size_t(i)] = lo + (hi - lo) * double(i) / double(n - 1);
    out.back() = hi;
    return out;
}

int cmd_solve(const ExperimentConfig& cfg, const std::string& out_dir,
              const std::string& format) {
    const herdreg::PointResult p = herdreg::run_point(cfg);
    const auto kv = herdreg::flat_record(p);
    const std::string body = format == "json" ? record_to_json(kv) : record_to_csv(kv);
    write_or_print(body, out_dir, std::string("point.") + format);
    return 0;
}

int cmd_case(int which, const ExperimentConfig& cfg, const std::string& out_dir,
             const std::string& format) {
    const herdreg::CaseResult res =
        which == 1 ? herdreg::run_case1(cfg) : herdreg::run_case2(cfg);
    for (const herdreg::CaseSummary& s : res.summaries) {
        std::cout << "kappa=" << herdreg::format_g12(s.kappa);
        if (which == 1)
            std::cout << " critical_alpha="
                      << (s.critical_defined ? herdreg::format_g12(s.critical_value)
                                             : std::string("none"));
        else
            std::cout << " eta_breve="
                      << (s.critical_defined ? herdreg::format_g12(s.critical_value)
                                             : std::string("inf"))
                      << " regulated_decision_spread="
                      << herdreg::format_g12(s.regulated_variation);
        std::cout << "\n";
    }
    const std::string name = (which == 1 ? "case1." : "case2.") + format;
    if (out_dir.empty()) {
        std::cout << herdreg::render_rows(res.rows, format);
    } else {
        herdreg::emit(res.rows, format, out_dir + "/" + name);
        std::cout << "wrote " << out_dir + "/" + name << "\n";
    }
    return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir,
                 const std::string& format, std::int64_t paths, std::int64_t steps,
                 double ratio_flag, bool ratio_set) {
    const herdreg::PointResult p = herdreg::run_point(cfg);
    const double ratio = ratio_set ? ratio_flag : p.mech.ratio_star;

    herdreg::SimConfig sc;
    sc.paths = paths;
    sc.steps = steps;
    sc.seed = cfg.seed;
    const herdreg::SimResult s =
        herdreg::simulate_terminal_fund(cfg.market, cfg.profiles, ratio, sc);

    // Closed forms for x_T (Gaussian along a proportional strategy): mean
    // ratio nu^2 T/(leader_alpha sigma^2), variance ratio^2 nu^2 T /
    // leader_alpha^2 sigma^2; utility -exp(-a m + a^2 v/2)/a.
    const herdreg::MarketParams& m = cfg.market;
    const double la = cfg.profiles.leader_alpha, a = cfg.profiles.follower_alpha;
    const double mean_cf = ratio * m.nu * m.nu * m.T / (la * m.sigma * m.sigma);
    const double var_cf = ratio * ratio * m.nu * m.nu * m.T / (la * la * m.sigma * m.sigma);
    const double util_cf = -std::exp(-a * mean_cf + 0.5 * a * a * var_cf) / a;

    std::vector<std::pair<std::string, std::string>> kv;
    auto add = [&](const char* k, double x) { kv.emplace_back(k, herdreg::format_g12(x)); };
    add("ratio", ratio);
    add("paths", double(sc.paths));
    add("steps", double(sc.steps));
    add("seed", double(sc.seed));
    add("mean_terminal_fund", s.mean_terminal_fund);
    add("std_error", s.std_error);
    add("mean_utility", s.mean_utility);
    add("utility_std_error", s.utility_std_error);
    add("closed_form_mean", mean_cf);
    add("closed_form_utility", util_cf);
    if (s.std_error > 0.0) add("mean_z", (s.mean_terminal_fund - mean_cf) / s.std_error);
    if (s.utility_std_error > 0.0)
        add("utility_z", (s.mean_utility - util_cf) / s.utility_std_error);
    const std::string body = format == "json" ? record_to_json(kv) : record_to_csv(kv);
    write_or_print(body, out_dir, std::string("simulate.") + format);
    return 0;
}

int cmd_verify(const ExperimentConfig& cfg, int grid_n) {
    const herdreg::PolicyUtility u = cfg.policy_utility();
    const herdreg::CompensationUtility v = cfg.compensation_utility();
    const double eta_top = cfg.profiles.eta;
    int failures = 0;

    for (double kappa : cfg.kappa_list) {
        const herdreg::MechanismContext ctx =
            herdreg::make_mechanism_context(cfg.market, cfg.profiles, u, kappa);
        const double eb = ctx.thr.eta_breve;
        if (!ctx.thr.intervene_ever || eb >= eta_top) {
            std::cout << "kappa=" << herdreg::format_g12(kappa)
                      << ": no regulated range below eta=" << herdreg::format_g12(eta_top)
                      << "; skipping\n";
            continue;
        }
        int ir_pass = 0, ic_pass = 0;
        for (int i = 1; i <= grid_n; ++i) {
            const double eta = eb + (eta_top - eb) * double(i) / double(grid_n);
            const herdreg::IrReport ir =
                herdreg::verify_ir(cfg.market, cfg.profiles, u, v, ctx.thr, ctx.chi_res.chi, eta);
            if (ir.pass)
                ++ir_pass;
            else {
                ++failures;
                std::cout << "IR FAIL kappa=" << herdreg::format_g12(kappa)
                          << " eta=" << herdreg::format_g12(eta)
                          << " slack=" << herdreg::format_g12(ir.slack) << "\n";
            }
            const herdreg::IcReport ic =
                herdreg::verify_ic(cfg.market, cfg.profiles, u, v, ctx.thr, ctx.chi_res.chi, eta,
                                   linspace(0.0, eta, 41));
            if (ic.pass)
                ++ic_pass;
            else {
                ++failures;
                std::cout << "IC FAIL kappa=" << herdreg::format_g12(kappa)
                          << " eta=" << herdreg::format_g12(eta)
                          << " gap=" << herdreg::format_g12(ic.gap)
                          << " argmax=" << herdreg::format_g12(ic.argmax_report) << "\n";
            }
        }
        std::cout << "kappa=" << herdreg::format_g12(kappa) << " IR " << ir_pass << "/" << grid_n
                  << " IC " << ic_pass << "/" << grid_n << "\n";
    }
    if (failures) {
        std::cout << failures << " verification failure(s)\n";
        return 2;
    }
    std::cout << "all verifications passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regulated herding mechanism solver"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format = "csv";
    app.add_option("--config", config_path, "flat key=value config file");
    app.add_option("--out", out_dir, "output directory (default: print to stdout)");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    Overrides overrides;
    overrides.add_flags(app);

    CLI::App* c_solve = app.add_subcommand("solve", "single-point mechanism solve");
    CLI::App* c_case1 =
        app.add_subcommand("case1", "risk-coefficient sweep at fixed herd coefficient");
    CLI::App* c_case2 =
        app.add_subcommand("case2", "herd-coefficient sweep at fixed risk coefficient");
    CLI::App* c_sim = app.add_subcommand("simulate", "Monte Carlo check of a decision ratio");
    CLI::App* c_verify =
        app.add_subcommand("verify", "participation and truthful-reporting grid suites");
    // Global flags remain usable after the subcommand name.
    for (CLI::App* sub : {c_solve, c_case1, c_case2, c_sim, c_verify}) sub->fallthrough();

    std::int64_t paths = 100000, steps = 10000;
    double ratio_flag = 1.0;
    c_sim->add_option("--paths", paths, "Monte Carlo paths");
    c_sim->add_option("--steps", steps, "Euler steps");
    CLI::Option* ratio_opt =
        c_sim->add_option("--ratio", ratio_flag, "decision ratio (default: regulated optimum)");

    int grid_n = 51;
    c_verify->add_option("--grid-n", grid_n, "grid points on the regulated range")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = herdreg::load_config(config_path, cfg);
        overrides.apply(cfg);

        if (c_solve->parsed()) return cmd_solve(cfg, out_dir, format);
        if (c_case1->parsed()) return cmd_case(1, cfg, out_dir, format);
        if (c_case2->parsed()) return cmd_case(2, cfg, out_dir, format);
        if (c_sim->parsed())
            return cmd_simulate(cfg, out_dir, format, paths, steps, ratio_flag,
                                ratio_opt->count() > 0);
        if (c_verify->parsed()) return cmd_verify(cfg, grid_n);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
