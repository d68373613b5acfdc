#include "herdreg/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace herdreg {

namespace {

/// SplitMix64: seeds the per-path generators (Vigna's recommended seeder).
struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

/// xoshiro256++ 1.0 (public domain, Blackman & Vigna).
struct Xoshiro256pp {
    std::uint64_t s[4];

    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (std::uint64_t& w : s) w = sm.next();
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    /// Uniform on (-1, 1) from the top 53 bits.
    double uniform_pm1() { return 2.0 * ((next() >> 11) * 0x1.0p-53) - 1.0; }
};

/// Standard normals by the Marsaglia polar method (no trig calls).
struct PolarNormal {
    Xoshiro256pp rng;
    double spare = 0.0;
    bool have_spare = false;

    explicit PolarNormal(std::uint64_t seed) : rng(seed) {}

    double next() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        double u, v, s2;
        do {
            u = rng.uniform_pm1();
            v = rng.uniform_pm1();
            s2 = u * u + v * v;
        } while (s2 >= 1.0 || s2 == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s2) / s2);
        spare = v * f;
        have_spare = true;
        return u * f;
    }
};

struct BlockSums {
    long double x = 0.0L, x2 = 0.0L, u = 0.0L, u2 = 0.0L;
};

constexpr std::int64_t kBlockPaths = 4096;

}  // namespace

SimResult simulate_terminal_fund(const MarketParams& m, const AgentProfiles& profiles,
                                 double ratio, const SimConfig& cfg) {
    if (!(m.sigma > 0.0)) throw std::domain_error("simulate_terminal_fund: sigma must be positive");
    if (!(m.T > 0.0)) throw std::domain_error("simulate_terminal_fund: T must be positive");
    if (!(profiles.leader_alpha > 0.0) || !(profiles.follower_alpha > 0.0))
        throw std::domain_error("simulate_terminal_fund: risk aversions must be positive");
    if (!std::isfinite(m.r) || !std::isfinite(m.nu))
        throw std::domain_error("simulate_terminal_fund: market parameters must be finite");
    if (cfg.paths <= 0) throw std::domain_error("simulate_terminal_fund: paths must be positive");
    if (cfg.steps <= 0) throw std::domain_error("simulate_terminal_fund: steps must be positive");
    if (!std::isfinite(ratio)) throw std::domain_error("simulate_terminal_fund: ratio not finite");

    const std::int64_t paths = cfg.paths, steps = cfg.steps;
    const double dt = m.T / double(steps);
    const double sqrt_dt = std::sqrt(dt);
    const double growth = 1.0 + m.r * dt;
    const double alpha = profiles.follower_alpha;

    // Per-step drift/diffusion increments of the proportional strategy
    // pi(t_n) = ratio * nu / (leader_alpha sigma^2) * exp(r (t_n - T)),
    // evaluated at the left endpoints t_n = n dt (Euler).
    std::vector<double> drift(steps), diff(steps);
    const double base = ratio * m.nu / (profiles.leader_alpha * m.sigma * m.sigma);
    for (std::int64_t n = 0; n < steps; ++n) {
        const double pi_n = base * std::exp(m.r * (double(n) * dt - m.T));
        drift[n] = m.nu * pi_n * dt;
        diff[n] = m.sigma * pi_n * sqrt_dt;
    }

    const std::int64_t nblocks = (paths + kBlockPaths - 1) / kBlockPaths;
    std::vector<BlockSums> blocks(static_cast<std::size_t>(nblocks));

    auto run_blocks = [&](std::int64_t b_begin, std::int64_t b_end) {
        for (std::int64_t b = b_begin; b < b_end; ++b) {
            BlockSums acc;
            const std::int64_t i_begin = b * kBlockPaths;
            const std::int64_t i_end = std::min(paths, i_begin + kBlockPaths);
            for (std::int64_t i = i_begin; i < i_end; ++i) {
                // Key each path's stream by (seed, path index): independent of
                // scheduling, reproducible path by path.
                PolarNormal gen(cfg.seed ^ (0x9E3779B97F4A7C15ull * std::uint64_t(i + 1)));
                double x = 0.0;
                for (std::int64_t n = 0; n < steps; ++n)
                    x = x * growth + drift[n] + diff[n] * gen.next();
                const double util = -std::exp(-alpha * x) / alpha;
                acc.x += x;
                acc.x2 += (long double)(x)*x;
                acc.u += util;
                acc.u2 += (long double)(util)*util;
            }
            blocks[std::size_t(b)] = acc;
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::int64_t nthreads = std::min<std::int64_t>(hw, nblocks);
    if (nthreads <= 1) {
        run_blocks(0, nblocks);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(nthreads));
        for (std::int64_t t = 0; t < nthreads; ++t) {
            const std::int64_t b0 = nblocks * t / nthreads;
            const std::int64_t b1 = nblocks * (t + 1) / nthreads;
            pool.emplace_back(run_blocks, b0, b1);
        }
        for (std::thread& th : pool) th.join();
    }

    // Ordered reduction: block index order, independent of thread layout.
    BlockSums total;
    for (const BlockSums& b : blocks) {
        total.x += b.x;
        total.x2 += b.x2;
        total.u += b.u;
        total.u2 += b.u2;
    }

    SimResult res;
    const long double n = (long double)(paths);
    res.mean_terminal_fund = double(total.x / n);
    res.mean_utility = double(total.u / n);
    if (paths >= 2) {
        const long double vx =
            std::max(0.0L, (total.x2 - n * (total.x / n) * (total.x / n)) / (n - 1.0L));
        const long double vu =
            std::max(0.0L, (total.u2 - n * (total.u / n) * (total.u / n)) / (n - 1.0L));
        res.std_error = double(std::sqrt(vx / n));
        res.utility_std_error = double(std::sqrt(vu / n));
    }
    return res;
}

}  // namespace herdreg
