#pragma once

#include <string>
#include <utility>
#include <vector>

#include "herdreg/config.hpp"
#include "herdreg/follower.hpp"
#include "herdreg/mechanism.hpp"
#include "herdreg/montecarlo.hpp"

namespace herdreg {

/// Full single-point solution: mechanism record plus the follower solutions
/// of both branches and an optional Monte Carlo check of the regulated
/// decision.
struct PointResult {
    MechanismResult mech;
    FollowerSolution star;         ///< at the optimal effective coefficient
    FollowerSolution unregulated;  ///< at lambda = eta
    bool has_sim = false;
    SimResult sim;
};

PointResult run_point(const ExperimentConfig& cfg, bool with_sim = false);

/// One sweep record: cost variant, independent variable, threshold marker,
/// policy and compensation, terminal decisions of both branches, gain, and
/// the qualitative region label.
struct SweepRow {
    double kappa = 0.0;
    double value = 0.0;      ///< alpha (case 1) or eta (case 2)
    double eta_breve = 0.0;  ///< threshold at this row's parameters (+inf = never)
    double q_star = 0.0;
    double c_star = 0.0;
    double pi_star_T = 0.0;  ///< regulated decision at t = T
    double pi_bar_T = 0.0;   ///< unregulated decision at t = T
    double gain = 0.0;
    std::string region;  ///< case 1: "i" | "ii" | "iii"; case 2: "i" | "ii"
};

/// Per-cost-variant sweep summary.
struct CaseSummary {
    double kappa = 0.0;
    bool critical_defined = false;
    /// Case 1: the risk coefficient where the threshold equals the swept eta;
    /// case 2: the threshold eta_breve itself.
    double critical_value = 0.0;
    /// Case 2 only: relative spread (max-min over midpoint) of the regulated
    /// terminal decision across the regulated rows.
    double regulated_variation = 0.0;
};

struct CaseResult {
    std::vector<SweepRow> rows;  ///< kappa variants in list order, values ascending
    std::vector<CaseSummary> summaries;
};

/// Risk-coefficient sweep at fixed eta (defaults alpha in [0.2, 0.35],
/// eta = 0.01) for every cost variant; reports the critical risk coefficient
/// per variant by bisection on the threshold curve.
CaseResult run_case1(const ExperimentConfig& cfg);

/// Herd-coefficient sweep at fixed alpha (defaults eta in [0, 0.01],
/// alpha = 0.25) for every cost variant; reports the threshold per variant
/// and the near-constancy of the regulated decision above it.
CaseResult run_case2(const ExperimentConfig& cfg);

/// Serializes with 12 significant digits ("%.12g"); infinities render as
/// "inf". Formats: "csv" (header + one line per row) and "json" (array of
/// records; infinities as the string "inf"). Byte-deterministic.
std::string render_rows(const std::vector<SweepRow>& table, const std::string& format);

/// Writes render_rows() to a file. Throws std::runtime_error naming the path
/// on I/O failure or an empty table.
void emit(const std::vector<SweepRow>& table, const std::string& format,
          const std::string& path);

/// Parses CSV produced by render_rows (round-trip check helper). Throws
/// std::runtime_error on malformed input.
std::vector<SweepRow> parse_rows_csv(const std::string& text);

/// Flat key/value record of a point solve, diagnostics included, in a fixed
/// order; numeric values rendered with "%.12g".
std::vector<std::pair<std::string, std::string>> flat_record(const PointResult& p);

/// "%.12g" rendering used by all emitters.
std::string format_g12(double x);

}  // namespace herdreg
