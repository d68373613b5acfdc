#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "herdreg/montecarlo.hpp"
#include "oracles.hpp"

using namespace herdreg;

namespace {
const MarketParams kM{};
const AgentProfiles kP{};
}  // namespace

TEST_CASE("determinism: identical configuration, identical bits") {
    const SimConfig cfg{5000, 200, 42};
    const SimResult a = simulate_terminal_fund(kM, kP, 1.1, cfg);
    const SimResult b = simulate_terminal_fund(kM, kP, 1.1, cfg);
    CHECK(a.mean_terminal_fund == b.mean_terminal_fund);
    CHECK(a.std_error == b.std_error);
    CHECK(a.mean_utility == b.mean_utility);
    CHECK(a.utility_std_error == b.utility_std_error);

    SimConfig other = cfg;
    other.seed = 43;
    const SimResult c = simulate_terminal_fund(kM, kP, 1.1, other);
    CHECK(c.mean_terminal_fund != a.mean_terminal_fund);
}

TEST_CASE("degenerate strategy: ratio 0 stays at zero wealth exactly") {
    const SimResult r = simulate_terminal_fund(kM, kP, 0.0, SimConfig{1000, 50, 7});
    CHECK(r.mean_terminal_fund == 0.0);
    CHECK(r.std_error == 0.0);
    CHECK(r.mean_utility == doctest::Approx(-1.0 / kP.follower_alpha).epsilon(1e-15));
    CHECK(r.utility_std_error == 0.0);
}

TEST_CASE("agreement with the Gaussian law of the terminal fund") {
    for (double ratio : {1.0, 1.2}) {
        const SimResult r = simulate_terminal_fund(kM, kP, ratio, SimConfig{20000, 800, 12345});
        const double mean_cf = oracles::fund_mean(kM, kP.leader_alpha, ratio);
        const double util_cf =
            oracles::utility_mean(kM, kP.follower_alpha, kP.leader_alpha, ratio);
        CHECK(r.std_error > 0.0);
        CHECK(r.utility_std_error > 0.0);
        // 3 standard errors plus the small first-order time-step bias.
        CHECK(std::abs(r.mean_terminal_fund - mean_cf) <= 3.0 * r.std_error + 0.025);
        CHECK(std::abs(r.mean_utility - util_cf) <= 3.0 * r.utility_std_error + 0.01);
        // Standard error magnitude: sigma(x_T)/sqrt(n), sigma about 4.2-5.0.
        CHECK(r.std_error >= 0.02);
        CHECK(r.std_error <= 0.05);
    }
}

TEST_CASE("weak first-order convergence in the time step") {
    // At ratio 1.2 the scheme's mean bias is about 16/steps: clearly visible
    // at 100 steps, inside the noise by 800. A half-order scheme would show
    // about 1.6 at 100 steps, a second-order one about 0.002; the window
    // separates the three.
    const double cf = oracles::fund_mean(kM, kP.leader_alpha, 1.2);
    const SimResult coarse = simulate_terminal_fund(kM, kP, 1.2, SimConfig{40000, 100, 12345});
    const SimResult fine = simulate_terminal_fund(kM, kP, 1.2, SimConfig{40000, 800, 12345});
    const double err_coarse = std::abs(coarse.mean_terminal_fund - cf);
    const double err_fine = std::abs(fine.mean_terminal_fund - cf);
    CHECK(err_coarse >= 0.08);
    CHECK(err_coarse <= 0.25);
    CHECK(err_fine <= 0.08);
    CHECK(err_fine < err_coarse);
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS((void)simulate_terminal_fund(kM, kP, 1.0, SimConfig{0, 100, 1}),
                    std::domain_error);
    CHECK_THROWS_AS((void)simulate_terminal_fund(kM, kP, 1.0, SimConfig{100, 0, 1}),
                    std::domain_error);
    CHECK_THROWS_AS(
        (void)simulate_terminal_fund(kM, kP, std::numeric_limits<double>::infinity(),
                                     SimConfig{100, 100, 1}),
        std::domain_error);
    MarketParams bad = kM;
    bad.sigma = 0.0;
    CHECK_THROWS_AS((void)simulate_terminal_fund(bad, kP, 1.0, SimConfig{100, 100, 1}),
                    std::domain_error);
}
