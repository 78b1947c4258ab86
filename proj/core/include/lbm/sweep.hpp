#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace lbm::sweep {

/// One clock-rate setting of the scan.
struct SweepPoint {
    double clock_mhz = 0.0;
    double ets_j = 0.0;
    double tts_s = 0.0;
    std::optional<double> mlups;
    std::optional<double> mean_temp_c;
    std::optional<std::string> node_id;
};

/// ETS x TTS in joule-seconds; the minimum marks the balanced work point.
double action(const SweepPoint& p);

/// Clock of the minimum-action point; ties break toward the higher clock
/// (shorter time at equal action). Requires a non-empty set.
double argmin_action(std::span<const SweepPoint> points);

struct Variation {
    double clock_mhz = 0.0;
    double dtts_pct = 0.0; // 100 (tts - tts_ref) / tts_ref
    double dets_pct = 0.0;
};

/// Per-point percentage variations relative to the point at reference_clock;
/// the reference maps to (0, 0). Throws when the reference clock is absent.
std::vector<Variation> normalized_variations(std::span<const SweepPoint> points,
                                             double reference_clock);

struct TempSeries {
    std::string node_id;
    std::vector<std::pair<double, double>> points; // (clock, mean temp), sorted
    int monotonicity_violations = 0; // adjacent pairs where temp drops as clock rises
};

/// Per-node (clock, temperature) series; nodes are never averaged together.
std::vector<TempSeries> temperature_curve(std::span<const SweepPoint> points);

struct AlignmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NodeVariability {
    struct SpreadPoint {
        double clock_mhz = 0.0;
        double spread = 0.0; // (max - min) / mean of action across nodes
    };
    std::vector<SpreadPoint> per_clock;
    double max_spread = 0.0;
};

/// Cross-node spread of the action curves. Requires >= 2 nodes sharing a
/// common clock grid; mismatches raise AlignmentError listing the missing
/// clocks.
NodeVariability node_variability(std::span<const SweepPoint> points);

struct SweepAnalysis {
    std::vector<SweepPoint> series; // per-clock analysis series, sorted by clock
    double reference_clock = 0.0;
    double argmin_clock = 0.0;
    double action_at_argmin = 0.0;
    std::vector<Variation> normalized;

    /// Best energy saving whose slowdown, truncated to whole percent, stays
    /// within the budget (dtts < budget + 1).
    std::optional<Variation> pick_within_slowdown(double budget_pct) const;
};

/// Build the analysis series. Points from several nodes are averaged per
/// clock; the reference defaults to the maximum clock present.
SweepAnalysis analyze(std::vector<SweepPoint> points,
                      std::optional<double> reference_clock = {});

/// CSV: clock_mhz,ets_j,tts_s,mlups,action_js,dtts_pct,dets_pct,mean_temp_c
void write_report_csv(std::ostream& out, const SweepAnalysis& analysis);

nlohmann::json report_json(const SweepAnalysis& analysis);

/// Input CSV: clock_mhz,ets_j,tts_s[,mlups[,mean_temp_c[,node_id]]].
/// A header row is detected and skipped; '#' lines are comments.
std::vector<SweepPoint> read_points_csv(std::istream& in);

} // namespace lbm::sweep
