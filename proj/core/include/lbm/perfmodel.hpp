#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "lbm/grid.hpp"

namespace lbm::perf {

/// Scalar loads+stores per site update. The baseline runs two passes
/// (collide reads and writes all 19 populations, propagate reads and writes
/// the 18 moving ones); the fused sweep touches each population once per
/// side. At 8 bytes per scalar the baseline moves 592 bytes per update.
inline constexpr int kBaselineScalarTransfers = 2 * 19 + 2 * 18; // 74
inline constexpr int kFusedScalarTransfers = 19 + 18;            // 37

/// Operations per site update used to convert LUPS to FLOPS.
inline constexpr double kOpsPerUpdate = 250.0;

struct KernelProfile {
    double ops_per_update = kOpsPerUpdate;
    double bytes_per_update = 0.0;
    std::string label;
};

struct MachineSpec {
    double mem_bandwidth_bytes_per_s = 1.6e12; // 1600 GB/s
    int gpus_per_node = 4;
};

struct RooflineCap {
    double flops = 0.0; // attainable ops/s under the bandwidth roof
    double lups = 0.0;  // site updates/s
    double mlups() const { return lups / 1e6; }
    double gflops() const { return flops / 1e9; }
};

/// Bytes stored per population scalar for a precision mode.
int storage_bytes(Precision p);

/// Bytes moved per site update for a scheme/precision pair. Reproduces the
/// canonical 592 / 296 / 148 figures.
double traffic_model(Scheme scheme, Precision precision);

/// Profile with the canonical op count and traffic for a scheme/precision.
KernelProfile canonical_profile(Scheme scheme, Precision precision);

/// ops per byte moved.
double arithmetic_intensity(const KernelProfile& profile);

/// Bandwidth-roof performance: flops = AI * bandwidth * n_gpus,
/// lups = flops / ops_per_update. Requires 1 <= n_gpus <= gpus_per_node.
RooflineCap roofline_cap(const KernelProfile& profile, const MachineSpec& machine,
                         int n_gpus);

/// updates / seconds / 1e6. Requires seconds > 0.
double mlups(std::int64_t updates, double seconds);

/// Energy cost per 1e9 site updates, ets / (updates / 1e9).
/// Requires updates > 0.
double operation_cost(double ets_joules, std::int64_t updates);

struct CostReport {
    std::string label;
    std::optional<double> ets_j;
    double tts_s = 0.0;
    std::int64_t updates = 0;
    double mlups = 0.0;
    std::optional<double> cost_j_per_gupdate;

    static CostReport make(std::string label, std::optional<double> ets_j,
                           double tts_s, std::int64_t updates);
};

/// CSV with header label,ets_j,tts_s,updates,mlups,cost_j_per_gupdate.
void write_cost_csv(std::ostream& out, std::span<const CostReport> rows);

nlohmann::json cost_json(std::span<const CostReport> rows);

} // namespace lbm::perf
