#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace lbm::telemetry {

/// One line of the nvidia-smi monitoring log. Field order matches the
/// query list: index, timestamp, power.draw, clocks.sm, clocks.mem,
/// temperature.gpu, temperature.memory, utilization.gpu, utilization.memory
/// with --format=csv,noheader,nounits.
struct PowerSample {
    int gpu_index = 0;
    std::int64_t timestamp_ms = 0; // absolute civil time, ms resolution
    double power_w = 0.0;
    double clock_sm_mhz = 0.0;
    double clock_mem_mhz = 0.0;
    double temp_gpu_c = 0.0;
    double temp_mem_c = 0.0;
    double util_gpu_pct = 0.0;
    double util_mem_pct = 0.0;

    bool operator==(const PowerSample&) const = default;
};

struct GpuTrace {
    int gpu_index = 0;
    std::vector<PowerSample> samples; // time-ordered
    double nominal_period_s = 1.0;
};

struct PlateauSegment {
    std::int64_t t_start_ms = 0;
    std::int64_t t_end_ms = 0;
    double mean_power_w = 0.0;
    double mean_clock_sm_mhz = 0.0;
    double mean_temp_c = 0.0;

    double duration_s() const {
        return double(t_end_ms - t_start_ms) / 1000.0;
    }
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlateauError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseResult {
    std::vector<GpuTrace> traces; // sorted by gpu_index
    long parsed_lines = 0;
    long skipped_lines = 0; // malformed non-empty lines (never dropped silently)
};

/// Parse a monitoring log. Malformed lines are counted and skipped; an input
/// with zero parseable lines or a per-GPU timestamp regression throws
/// ParseError (naming the line).
ParseResult parse_smi_csv(std::istream& in);

/// "YYYY/MM/DD HH:MM:SS.mmm" -> absolute milliseconds (civil time).
std::int64_t parse_timestamp_ms(const std::string& text);
std::string format_timestamp_ms(std::int64_t ms);

/// Render a sample in the log's line format (inverse of the parser on
/// well-formed lines; clocks/temperatures/utilizations print as integers).
std::string serialize_sample(const PowerSample& s);

struct PlateauConfig {
    double util_min_pct = 90.0; // utilization threshold for the plateau
    double power_fraction = 0.5; // fallback: idle + F * (max - idle)
    int min_run = 3;            // shortest acceptable plateau, in samples
    int idle_head_samples = 5;  // samples averaged for the idle floor
};

/// Longest run of consecutive samples with utilization >= util_min_pct.
/// When utilization is zero throughout the trace, falls back to a power
/// threshold at idle_floor + power_fraction * (max - idle_floor).
/// Throws PlateauError when no qualifying run of min_run samples exists.
PlateauSegment detect_plateau(const GpuTrace& trace,
                              const PlateauConfig& config = {});

/// Trapezoidal integral of power over samples inside the segment, using the
/// recorded timestamp deltas. Requires at least two samples in range.
double integrate_energy(const GpuTrace& trace, const PlateauSegment& segment);

struct GpuEnergy {
    int gpu_index = 0;
    double ets_j = 0.0;
    double tts_s = 0.0;
    PlateauSegment plateau;
};

struct RunEnergyReport {
    std::vector<GpuEnergy> per_gpu;
    double node_ets_j = 0.0;  // sum over GPUs
    double node_tts_s = 0.0;  // max plateau end - min plateau start
    long skipped_lines = 0;   // carried from parsing, if known
};

/// Per-GPU plateau metrics plus node-level aggregation. PlateauError from a
/// GPU propagates with the GPU index named.
RunEnergyReport node_report(std::span<const GpuTrace> traces,
                            const PlateauConfig& config = {});

/// CSV rows: node,gpu,t_start,t_end,tts_s,ets_j,mean_power_w,mean_clock_mhz,mean_temp_c
void write_report_csv(std::ostream& out, const std::string& node,
                      const RunEnergyReport& report, bool header = true);

nlohmann::json report_json(const std::string& node,
                           const RunEnergyReport& report);

/// Synthetic trace shaped like a run's power history: idle header, linear
/// ramp, plateau (optionally jittered), ramp down, idle trailer.
struct SynthSpec {
    double idle_w = 60.0;
    double plateau_w = 300.0;
    double idle_s = 10.0;
    double ramp_s = 0.0;
    double plateau_s = 200.0;
    double jitter_w = 0.0;   // uniform +-jitter on plateau samples
    double period_s = 1.0;
    unsigned seed = 1;
    int gpu_index = 0;
    std::int64_t t0_ms = 1'700'000'000'000; // arbitrary fixed epoch
    double clock_sm_mhz = 1395.0;
    double clock_mem_mhz = 1593.0;
    double temp_idle_c = 45.0;
    double temp_busy_c = 60.0;
};

struct SynthTrace {
    GpuTrace trace;
    PlateauSegment truth;  // ground-truth plateau boundaries and means
    double analytic_ets_j; // plateau_w * truth duration (exact for zero jitter)
};

/// Deterministic for a given seed.
SynthTrace synth_trace(const SynthSpec& spec);

} // namespace lbm::telemetry
