#include "lbm/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <string_view>

namespace lbm::telemetry {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                          s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                          s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    const std::string tmp(s);
    out = std::strtod(tmp.c_str(), &end);
    return end == tmp.c_str() + tmp.size() && std::isfinite(out);
}

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return std::int64_t(era) * 146097 + int(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = std::int64_t(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = int(doy - (153 * mp + 2) / 5 + 1);
    m = int(mp + (mp < 10 ? 3 : -9));
    y = int(yy + (m <= 2));
}

} // namespace

std::int64_t parse_timestamp_ms(const std::string& text) {
    int y, mo, d, h, mi, s, ms;
    if (std::sscanf(text.c_str(), "%d/%d/%d %d:%d:%d.%d", &y, &mo, &d, &h,
                    &mi, &s, &ms) != 7) {
        throw ParseError("bad timestamp '" + text + "'");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
        mi > 59 || s < 0 || s > 60 || ms < 0 || ms > 999) {
        throw ParseError("bad timestamp '" + text + "'");
    }
    const std::int64_t days = days_from_civil(y, mo, d);
    return (((days * 24 + h) * 60 + mi) * 60 + s) * 1000 + ms;
}

std::string format_timestamp_ms(std::int64_t ms) {
    std::int64_t rest = ms / 1000;
    const int msec = int(ms % 1000);
    const int sec = int(rest % 60);
    rest /= 60;
    const int min = int(rest % 60);
    rest /= 60;
    const int hour = int(rest % 24);
    rest /= 24;
    int y, mo, d;
    civil_from_days(rest, y, mo, d);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d/%02d/%02d %02d:%02d:%02d.%03d", y,
                  mo, d, hour, min, sec, msec);
    return buf;
}

std::string serialize_sample(const PowerSample& s) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d, %s, %.2f, %lld, %lld, %lld, %lld, %lld, %lld",
                  s.gpu_index, format_timestamp_ms(s.timestamp_ms).c_str(),
                  s.power_w, llround(s.clock_sm_mhz),
                  llround(s.clock_mem_mhz), llround(s.temp_gpu_c),
                  llround(s.temp_mem_c), llround(s.util_gpu_pct),
                  llround(s.util_mem_pct));
    return buf;
}

ParseResult parse_smi_csv(std::istream& in) {
    ParseResult result;
    std::map<int, GpuTrace> by_gpu;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view whole = trim(line);
        if (whole.empty()) continue;

        // Split into the 9 expected fields.
        std::string_view fields[9];
        std::string_view rest = whole;
        int nfields = 0;
        bool overflow = false;
        while (true) {
            const std::size_t comma = rest.find(',');
            const std::string_view field =
                comma == std::string_view::npos ? rest : rest.substr(0, comma);
            if (nfields == 9) {
                overflow = true;
                break;
            }
            fields[nfields++] = trim(field);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }

        PowerSample s;
        bool ok = !overflow && nfields == 9;
        if (ok) {
            double idx;
            ok = parse_double(fields[0], idx) && idx >= 0 &&
                 idx == std::floor(idx);
            if (ok) s.gpu_index = int(idx);
        }
        if (ok) {
            try {
                s.timestamp_ms = parse_timestamp_ms(std::string(fields[1]));
            } catch (const ParseError&) {
                ok = false;
            }
        }
        ok = ok && parse_double(fields[2], s.power_w) &&
             parse_double(fields[3], s.clock_sm_mhz) &&
             parse_double(fields[4], s.clock_mem_mhz) &&
             parse_double(fields[5], s.temp_gpu_c) &&
             parse_double(fields[6], s.temp_mem_c) &&
             parse_double(fields[7], s.util_gpu_pct) &&
             parse_double(fields[8], s.util_mem_pct);
        ok = ok && s.power_w >= 0.0 && s.util_gpu_pct >= 0.0 &&
             s.util_gpu_pct <= 100.0 && s.util_mem_pct >= 0.0 &&
             s.util_mem_pct <= 100.0;

        if (!ok) {
            ++result.skipped_lines;
            continue;
        }
        auto& trace = by_gpu[s.gpu_index];
        trace.gpu_index = s.gpu_index;
        if (!trace.samples.empty() &&
            s.timestamp_ms < trace.samples.back().timestamp_ms) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": timestamp regression for GPU " +
                             std::to_string(s.gpu_index));
        }
        trace.samples.push_back(s);
        ++result.parsed_lines;
    }
    if (result.parsed_lines == 0) {
        throw ParseError("no parseable samples in log (" +
                         std::to_string(result.skipped_lines) +
                         " malformed lines)");
    }
    result.traces.reserve(by_gpu.size());
    for (auto& [idx, trace] : by_gpu) {
        result.traces.push_back(std::move(trace));
    }
    return result;
}

namespace {

struct Run {
    std::size_t first = 0, last = 0; // inclusive sample indices
    std::size_t length() const { return last - first + 1; }
};

template <class Pred>
std::optional<Run> longest_run(const std::vector<PowerSample>& samples,
                               Pred pred, std::size_t min_len) {
    std::optional<Run> best;
    std::size_t i = 0;
    while (i < samples.size()) {
        if (!pred(samples[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < samples.size() && pred(samples[j + 1])) ++j;
        if (j - i + 1 >= min_len &&
            (!best || j - i + 1 > best->length())) {
            best = Run{i, j};
        }
        i = j + 1;
    }
    return best;
}

} // namespace

PlateauSegment detect_plateau(const GpuTrace& trace,
                              const PlateauConfig& config) {
    const auto& s = trace.samples;
    if (s.size() < 5) {
        throw PlateauError("GPU " + std::to_string(trace.gpu_index) +
                           ": need at least 5 samples, got " +
                           std::to_string(s.size()));
    }
    const std::size_t min_len = std::size_t(std::max(config.min_run, 2));

    double max_util = 0.0;
    for (const auto& x : s) max_util = std::max(max_util, x.util_gpu_pct);

    std::optional<Run> run;
    if (max_util > 0.0) {
        run = longest_run(
            s, [&](const PowerSample& x) {
                return x.util_gpu_pct >= config.util_min_pct;
            },
            min_len);
    } else {
        // Utilization absent: threshold on power above the idle floor.
        const std::size_t head =
            std::min<std::size_t>(std::size_t(config.idle_head_samples),
                                  s.size());
        double idle = 0.0;
        for (std::size_t i = 0; i < head; ++i) idle += s[i].power_w;
        idle /= double(head);
        double max_power = 0.0;
        for (const auto& x : s) max_power = std::max(max_power, x.power_w);
        const double swing = max_power - idle;
        if (swing > std::max(1.0, 0.05 * idle)) {
            const double threshold = idle + config.power_fraction * swing;
            run = longest_run(
                s,
                [&](const PowerSample& x) { return x.power_w >= threshold; },
                min_len);
        }
    }
    if (!run) {
        throw PlateauError("GPU " + std::to_string(trace.gpu_index) +
                           ": no plateau of at least " +
                           std::to_string(min_len) + " samples");
    }

    PlateauSegment seg;
    seg.t_start_ms = s[run->first].timestamp_ms;
    seg.t_end_ms = s[run->last].timestamp_ms;
    double p = 0.0, c = 0.0, t = 0.0;
    for (std::size_t i = run->first; i <= run->last; ++i) {
        p += s[i].power_w;
        c += s[i].clock_sm_mhz;
        t += s[i].temp_gpu_c;
    }
    const double cnt = double(run->length());
    seg.mean_power_w = p / cnt;
    seg.mean_clock_sm_mhz = c / cnt;
    seg.mean_temp_c = t / cnt;
    return seg;
}

double integrate_energy(const GpuTrace& trace, const PlateauSegment& segment) {
    const auto& s = trace.samples;
    // Neumaier-compensated trapezoid sum over the samples inside the segment.
    double sum = 0.0, comp = 0.0;
    const PowerSample* prev = nullptr;
    long count = 0;
    for (const auto& x : s) {
        if (x.timestamp_ms < segment.t_start_ms ||
            x.timestamp_ms > segment.t_end_ms)
            continue;
        ++count;
        if (prev) {
            const double dt = double(x.timestamp_ms - prev->timestamp_ms) / 1000.0;
            const double term = 0.5 * (prev->power_w + x.power_w) * dt;
            const double t = sum + term;
            if (std::abs(sum) >= std::abs(term)) {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        prev = &x;
    }
    if (count < 2) {
        throw std::domain_error(
            "energy integration needs at least 2 samples in the segment");
    }
    return sum + comp;
}

RunEnergyReport node_report(std::span<const GpuTrace> traces,
                            const PlateauConfig& config) {
    if (traces.empty()) {
        throw std::invalid_argument("node_report needs at least one trace");
    }
    RunEnergyReport report;
    std::int64_t min_start = 0, max_end = 0;
    bool first = true;
    for (const auto& trace : traces) {
        GpuEnergy g;
        g.gpu_index = trace.gpu_index;
        g.plateau = detect_plateau(trace, config);
        g.ets_j = integrate_energy(trace, g.plateau);
        g.tts_s = g.plateau.duration_s();
        report.node_ets_j += g.ets_j;
        if (first || g.plateau.t_start_ms < min_start)
            min_start = g.plateau.t_start_ms;
        if (first || g.plateau.t_end_ms > max_end)
            max_end = g.plateau.t_end_ms;
        first = false;
        report.per_gpu.push_back(g);
    }
    report.node_tts_s = double(max_end - min_start) / 1000.0;
    return report;
}

void write_report_csv(std::ostream& out, const std::string& node,
                      const RunEnergyReport& report, bool header) {
    if (header) {
        out << "node,gpu,t_start,t_end,tts_s,ets_j,mean_power_w,"
               "mean_clock_mhz,mean_temp_c\n";
    }
    char buf[256];
    for (const auto& g : report.per_gpu) {
        std::snprintf(buf, sizeof buf, ",%d,%s,%s,%.3f,%.3f,%.3f,%.3f,%.3f\n",
                      g.gpu_index,
                      format_timestamp_ms(g.plateau.t_start_ms).c_str(),
                      format_timestamp_ms(g.plateau.t_end_ms).c_str(),
                      g.tts_s, g.ets_j, g.plateau.mean_power_w,
                      g.plateau.mean_clock_sm_mhz, g.plateau.mean_temp_c);
        out << node << buf;
    }
}

nlohmann::json report_json(const std::string& node,
                           const RunEnergyReport& report) {
    nlohmann::json gpus = nlohmann::json::array();
    for (const auto& g : report.per_gpu) {
        gpus.push_back({{"gpu", g.gpu_index},
                        {"t_start", format_timestamp_ms(g.plateau.t_start_ms)},
                        {"t_end", format_timestamp_ms(g.plateau.t_end_ms)},
                        {"tts_s", g.tts_s},
                        {"ets_j", g.ets_j},
                        {"mean_power_w", g.plateau.mean_power_w},
                        {"mean_clock_mhz", g.plateau.mean_clock_sm_mhz},
                        {"mean_temp_c", g.plateau.mean_temp_c}});
    }
    return {{"node", node},
            {"gpus", gpus},
            {"node_ets_j", report.node_ets_j},
            {"node_tts_s", report.node_tts_s},
            {"skipped_lines", report.skipped_lines}};
}

SynthTrace synth_trace(const SynthSpec& spec) {
    if (spec.period_s <= 0.0) {
        throw std::invalid_argument("sampling period must be positive");
    }
    if (spec.idle_s < 0 || spec.ramp_s < 0 || spec.plateau_s < 0) {
        throw std::invalid_argument("durations must be non-negative");
    }
    const double t1 = spec.idle_s + spec.ramp_s;      // plateau start
    const double t2 = t1 + spec.plateau_s;            // plateau end
    const double total = t2 + spec.ramp_s + spec.idle_s;

    std::mt19937 rng(spec.seed);
    std::uniform_real_distribution<double> jitter(-spec.jitter_w,
                                                  spec.jitter_w);

    SynthTrace out;
    out.trace.gpu_index = spec.gpu_index;
    out.trace.nominal_period_s = spec.period_s;

    std::int64_t first_plateau = -1, last_plateau = -1;
    const long count = long(std::floor(total / spec.period_s)) + 1;
    for (long k = 0; k < count; ++k) {
        const double rel = double(k) * spec.period_s;
        PowerSample s;
        s.gpu_index = spec.gpu_index;
        s.timestamp_ms = spec.t0_ms + std::int64_t(llround(rel * 1000.0));
        s.clock_mem_mhz = spec.clock_mem_mhz;
        const bool busy = rel >= t1 && rel <= t2;
        if (rel < spec.idle_s) {
            s.power_w = spec.idle_w;
        } else if (rel < t1) {
            const double f = (rel - spec.idle_s) / spec.ramp_s;
            s.power_w = spec.idle_w + f * (spec.plateau_w - spec.idle_w);
        } else if (busy) {
            s.power_w = spec.plateau_w;
            if (spec.jitter_w > 0.0) s.power_w += jitter(rng);
        } else if (rel < t2 + spec.ramp_s) {
            const double f = (rel - t2) / spec.ramp_s;
            s.power_w = spec.plateau_w + f * (spec.idle_w - spec.plateau_w);
        } else {
            s.power_w = spec.idle_w;
        }
        s.util_gpu_pct = busy ? 100.0 : 0.0;
        s.util_mem_pct = busy ? 67.0 : 0.0;
        s.clock_sm_mhz = busy ? spec.clock_sm_mhz : 210.0;
        s.temp_gpu_c = busy ? spec.temp_busy_c : spec.temp_idle_c;
        s.temp_mem_c = s.temp_gpu_c - 5.0;
        if (busy) {
            if (first_plateau < 0) first_plateau = s.timestamp_ms;
            last_plateau = s.timestamp_ms;
        }
        out.trace.samples.push_back(s);
    }

    if (first_plateau >= 0) {
        out.truth.t_start_ms = first_plateau;
        out.truth.t_end_ms = last_plateau;
        out.truth.mean_power_w = spec.plateau_w;
        out.truth.mean_clock_sm_mhz = spec.clock_sm_mhz;
        out.truth.mean_temp_c = spec.temp_busy_c;
        out.analytic_ets_j =
            spec.plateau_w * double(last_plateau - first_plateau) / 1000.0;
    } else {
        out.analytic_ets_j = 0.0;
    }
    return out;
}

} // namespace lbm::telemetry
