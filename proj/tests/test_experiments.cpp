#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "herdreg/experiments.hpp"

using namespace herdreg;

namespace {

/// Small sweeps keep the suite fast; the full-size grids run in the
/// acceptance binary.
ExperimentConfig small_case2() {
    ExperimentConfig cfg;
    cfg.sweep_axis = "eta";
    cfg.sweep_min = 0.0;
    cfg.sweep_max = 0.01;
    cfg.sweep_n = 21;
    return cfg;
}

ExperimentConfig small_case1() {
    ExperimentConfig cfg;
    cfg.sweep_axis = "alpha";
    cfg.sweep_min = 0.2;
    cfg.sweep_max = 0.35;
    cfg.sweep_n = 11;
    cfg.kappa_list = {0.5};
    return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("defaults, comments, and overrides") {
        const ExperimentConfig cfg = parse_config(
            "# reference run\n"
            "eta = 0.008\n"
            "kappa_list = 0.1, 0.5\n"
            "\n"
            "sweep_axis = eta   # sweep the herd coefficient\n"
            "sweep_max = 0.008\n"
            "seed = 99\n");
        CHECK(cfg.profiles.eta == 0.008);
        CHECK(cfg.market.r == 0.04);  // untouched default
        REQUIRE(cfg.kappa_list.size() == 2);
        CHECK(cfg.kappa_list[0] == 0.1);
        CHECK(cfg.kappa_list[1] == 0.5);
        CHECK(cfg.sweep_axis == "eta");
        CHECK(cfg.seed == 99);
        CHECK(cfg.validate().empty());
    }
    SUBCASE("every numeric key is reachable") {
        ExperimentConfig cfg;
        apply_key(cfg, "r", "0.02");
        apply_key(cfg, "nu", "0.05");
        apply_key(cfg, "sigma", "0.2");
        apply_key(cfg, "T", "25");
        apply_key(cfg, "leader_alpha", "0.4");
        apply_key(cfg, "follower_alpha", "0.3");
        apply_key(cfg, "u_slope", "0.8");
        apply_key(cfg, "v_slope", "2");
        apply_key(cfg, "kappa", "0.25");
        apply_key(cfg, "sweep_n", "41");
        CHECK(cfg.market.T == 25.0);
        CHECK(cfg.profiles.leader_alpha == 0.4);
        CHECK(cfg.u_slope == 0.8);
        CHECK(cfg.kappa == 0.25);
        CHECK(cfg.sweep_n == 41);
    }
    SUBCASE("unknown keys and malformed values are named") {
        bool named = false;
        try {
            (void)parse_config("rr = 0.04\n");
        } catch (const std::runtime_error& e) {
            named = std::string(e.what()).find("rr") != std::string::npos;
        }
        CHECK(named);
        CHECK_THROWS_AS(parse_config("sigma = big\n"), std::runtime_error);
        CHECK_THROWS_AS(parse_config("just a line without equals\n"), std::runtime_error);
    }
    SUBCASE("sweep layout is validated") {
        ExperimentConfig cfg = small_case2();
        cfg.sweep_axis = "volatility";
        CHECK_FALSE(cfg.validate().empty());
        cfg = small_case2();
        cfg.sweep_min = 0.02;  // above sweep_max
        CHECK_FALSE(cfg.validate().empty());
        cfg = small_case2();
        cfg.sweep_n = 1;
        CHECK_FALSE(cfg.validate().empty());
    }
    SUBCASE("files load and missing files throw with the path") {
        const std::string path = "test_config_tmp.conf";
        {
            std::ofstream out(path);
            out << "eta = 0.004\n";
        }
        CHECK(load_config(path).profiles.eta == 0.004);
        std::remove(path.c_str());
        bool named = false;
        try {
            (void)load_config("no_such_file.conf");
        } catch (const std::runtime_error& e) {
            named = std::string(e.what()).find("no_such_file.conf") != std::string::npos;
        }
        CHECK(named);
    }
}

TEST_CASE("single-point run") {
    ExperimentConfig cfg;
    const PointResult p = run_point(cfg);
    CHECK_FALSE(p.has_sim);
    CHECK(p.mech.eta == cfg.profiles.eta);
    CHECK(p.mech.q_star == cfg.profiles.eta);
    CHECK(p.star.ratio == doctest::Approx(p.mech.ratio_star).epsilon(1e-15));
    CHECK(p.unregulated.ratio == doctest::Approx(p.mech.ratio_unregulated).epsilon(1e-15));

    const std::vector<std::pair<std::string, std::string>> rec = flat_record(p);
    bool has_chi_form = false, has_breve = false;
    for (const auto& kv : rec) {
        if (kv.first == "chi_form") has_chi_form = kv.second == "switch-jump";
        if (kv.first == "eta_breve") has_breve = true;
    }
    CHECK(has_chi_form);
    CHECK(has_breve);
}

TEST_CASE("herd-coefficient sweep (case 2)") {
    const CaseResult res = run_case2(small_case2());
    REQUIRE(res.rows.size() == 42);  // two cost variants x 21 points
    REQUIRE(res.summaries.size() == 2);

    for (const SweepRow& r : res.rows) {
        // Switch structure: exactly zero or exactly the herd coefficient,
        // and the branch follows the threshold comparison.
        const bool regulated = r.q_star != 0.0;
        CHECK((r.q_star == 0.0 || r.q_star == r.value));
        CHECK(regulated == (r.value > r.eta_breve));
        CHECK(r.region == (regulated ? "i" : "ii"));
        if (regulated) CHECK(r.c_star > 0.0);
        CHECK(r.pi_star_T >= r.pi_bar_T - 1e-12);
        CHECK(r.gain >= -1e-12);
    }

    // Values ascend within each cost variant.
    for (std::size_t i = 1; i < 21; ++i) CHECK(res.rows[i].value > res.rows[i - 1].value);

    // Summaries: thresholds and the flatness of the regulated branch.
    const CaseSummary& free_cost = res.summaries[0];
    const CaseSummary& paid_cost = res.summaries[1];
    CHECK(free_cost.kappa == 0.0);
    CHECK(paid_cost.kappa == 0.5);
    REQUIRE(paid_cost.critical_defined);
    CHECK(paid_cost.critical_value == doctest::Approx(0.00560072954007).epsilon(1e-6));
    CHECK(paid_cost.regulated_variation < 0.02);

    // The unregulated terminal decision strictly falls as herding grows.
    for (std::size_t i = 1; i < 21; ++i)
        CHECK(res.rows[i].pi_bar_T < res.rows[i - 1].pi_bar_T);
}

TEST_CASE("risk-coefficient sweep (case 1)") {
    const CaseResult res = run_case1(small_case1());
    REQUIRE(res.rows.size() == 11);
    REQUIRE(res.summaries.size() == 1);

    for (const SweepRow& r : res.rows) {
        CHECK((r.q_star == 0.0 || r.q_star == 0.01));
        if (r.value >= 0.3) {
            CHECK(r.region == "i");  // no risk-ordering edge
            CHECK(r.q_star == 0.0);
            CHECK(r.gain == 0.0);
            CHECK(std::isinf(r.eta_breve));
        } else {
            CHECK((r.region == (r.q_star > 0.0 ? "iii" : "ii")));
            CHECK(r.q_star == (r.value < 0.2529 ? 0.01 : 0.0));
        }
    }
    REQUIRE(res.summaries[0].critical_defined);
    CHECK(res.summaries[0].critical_value == doctest::Approx(0.252905130386).epsilon(1e-4));
}

TEST_CASE("serialization") {
    const CaseResult res = run_case2(small_case2());

    SUBCASE("csv renders deterministically and round-trips") {
        const std::string csv = render_rows(res.rows, "csv");
        CHECK(csv == render_rows(res.rows, "csv"));
        CHECK(csv.rfind("kappa,value,eta_breve,", 0) == 0);

        const std::vector<SweepRow> back = parse_rows_csv(csv);
        REQUIRE(back.size() == res.rows.size());
        for (std::size_t i = 0; i < back.size(); ++i) {
            CHECK(back[i].kappa == doctest::Approx(res.rows[i].kappa).epsilon(1e-12));
            CHECK(back[i].value == doctest::Approx(res.rows[i].value).epsilon(1e-12));
            CHECK(back[i].q_star == doctest::Approx(res.rows[i].q_star).epsilon(1e-12));
            CHECK(back[i].region == res.rows[i].region);
        }
        // Re-rendering the parsed table reproduces the bytes.
        CHECK(render_rows(back, "csv") == csv);
    }
    SUBCASE("json renders an array of records") {
        const std::string json = render_rows(res.rows, "json");
        CHECK(json.front() == '[');
        CHECK(json.find("\"eta_breve\"") != std::string::npos);
        CHECK(json == render_rows(res.rows, "json"));
    }
    SUBCASE("infinities serialize as inf and parse back") {
        const CaseResult c1 = run_case1(small_case1());
        const std::string csv = render_rows(c1.rows, "csv");
        CHECK(csv.find("inf") != std::string::npos);
        const std::vector<SweepRow> back = parse_rows_csv(csv);
        bool any_inf = false;
        for (const SweepRow& r : back) any_inf = any_inf || std::isinf(r.eta_breve);
        CHECK(any_inf);
    }
    SUBCASE("emit writes the rendered bytes") {
        const std::string path = "test_emit_tmp.csv";
        emit(res.rows, "csv", path);
        std::ifstream in(path, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        CHECK(content == render_rows(res.rows, "csv"));
        std::remove(path.c_str());
        CHECK_THROWS_AS(emit(res.rows, "csv", "no_such_dir/x.csv"), std::runtime_error);
        CHECK_THROWS_AS(emit(res.rows, "yaml", path), std::runtime_error);
    }
}

TEST_CASE("fixed-width significant-digit rendering") {
    CHECK(format_g12(0.1) == "0.1");
    CHECK(format_g12(0.0) == "0");
    CHECK(format_g12(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_g12(1.0 / 3.0) == "0.333333333333");
}
