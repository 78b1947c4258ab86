#include "lbm/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <set>
#include <string_view>

namespace lbm::sweep {

double action(const SweepPoint& p) { return p.ets_j * p.tts_s; }

double argmin_action(std::span<const SweepPoint> points) {
    if (points.empty()) {
        throw std::invalid_argument("argmin_action on empty point set");
    }
    const SweepPoint* best = &points[0];
    for (const auto& p : points) {
        const double a = action(p), b = action(*best);
        if (a < b || (a == b && p.clock_mhz > best->clock_mhz)) {
            best = &p;
        }
    }
    return best->clock_mhz;
}

std::vector<Variation> normalized_variations(std::span<const SweepPoint> points,
                                             double reference_clock) {
    const SweepPoint* ref = nullptr;
    for (const auto& p : points) {
        if (p.clock_mhz == reference_clock) ref = &p;
    }
    if (!ref) {
        throw std::invalid_argument("reference clock " +
                                    std::to_string(reference_clock) +
                                    " MHz not present in the sweep");
    }
    std::vector<Variation> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        Variation v;
        v.clock_mhz = p.clock_mhz;
        v.dtts_pct = 100.0 * (p.tts_s - ref->tts_s) / ref->tts_s;
        v.dets_pct = 100.0 * (p.ets_j - ref->ets_j) / ref->ets_j;
        if (&p == ref) v = {p.clock_mhz, 0.0, 0.0};
        out.push_back(v);
    }
    return out;
}

std::vector<TempSeries> temperature_curve(std::span<const SweepPoint> points) {
    std::map<std::string, std::vector<std::pair<double, double>>> by_node;
    for (const auto& p : points) {
        if (!p.mean_temp_c) continue;
        by_node[p.node_id.value_or("")].push_back(
            {p.clock_mhz, *p.mean_temp_c});
    }
    std::vector<TempSeries> out;
    for (auto& [node, series] : by_node) {
        std::sort(series.begin(), series.end());
        TempSeries t;
        t.node_id = node;
        t.points = std::move(series);
        for (std::size_t i = 1; i < t.points.size(); ++i) {
            if (t.points[i].second < t.points[i - 1].second) {
                ++t.monotonicity_violations;
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

NodeVariability node_variability(std::span<const SweepPoint> points) {
    std::map<std::string, std::map<double, double>> curves; // node -> clock -> action
    std::set<double> clocks;
    for (const auto& p : points) {
        curves[p.node_id.value_or("")][p.clock_mhz] = action(p);
        clocks.insert(p.clock_mhz);
    }
    if (curves.size() < 2) {
        throw AlignmentError("node variability needs at least 2 nodes, got " +
                             std::to_string(curves.size()));
    }
    std::string missing;
    for (const auto& [node, curve] : curves) {
        for (double c : clocks) {
            if (!curve.contains(c)) {
                missing += (missing.empty() ? "" : ", ") + node + "@" +
                           std::to_string(c);
            }
        }
    }
    if (!missing.empty()) {
        throw AlignmentError("clock grids differ across nodes; missing: " +
                             missing);
    }
    NodeVariability out;
    for (double c : clocks) {
        double lo = 0, hi = 0, sum = 0;
        bool first = true;
        for (const auto& [node, curve] : curves) {
            const double a = curve.at(c);
            lo = first ? a : std::min(lo, a);
            hi = first ? a : std::max(hi, a);
            sum += a;
            first = false;
        }
        const double mean = sum / double(curves.size());
        const double spread = mean > 0.0 ? (hi - lo) / mean : 0.0;
        out.per_clock.push_back({c, spread});
        out.max_spread = std::max(out.max_spread, spread);
    }
    return out;
}

std::optional<Variation> SweepAnalysis::pick_within_slowdown(
    double budget_pct) const {
    std::optional<Variation> best;
    for (const auto& v : normalized) {
        if (v.dtts_pct >= budget_pct + 1.0) continue;
        if (!best || v.dets_pct < best->dets_pct ||
            (v.dets_pct == best->dets_pct && v.clock_mhz > best->clock_mhz)) {
            best = v;
        }
    }
    return best;
}

SweepAnalysis analyze(std::vector<SweepPoint> points,
                      std::optional<double> reference_clock) {
    if (points.empty()) {
        throw std::invalid_argument("cannot analyze an empty sweep");
    }
    for (const auto& p : points) {
        if (!(p.clock_mhz > 0.0 && p.ets_j > 0.0 && p.tts_s > 0.0)) {
            throw std::invalid_argument(
                "sweep points need positive clock, ETS and TTS");
        }
    }

    // Collapse multiple nodes to a per-clock mean series.
    std::map<double, std::vector<const SweepPoint*>> by_clock;
    for (const auto& p : points) by_clock[p.clock_mhz].push_back(&p);

    SweepAnalysis a;
    for (const auto& [clock, group] : by_clock) {
        SweepPoint mean;
        mean.clock_mhz = clock;
        double mlups_sum = 0, temp_sum = 0;
        int mlups_n = 0, temp_n = 0;
        for (const SweepPoint* p : group) {
            mean.ets_j += p->ets_j;
            mean.tts_s += p->tts_s;
            if (p->mlups) {
                mlups_sum += *p->mlups;
                ++mlups_n;
            }
            if (p->mean_temp_c) {
                temp_sum += *p->mean_temp_c;
                ++temp_n;
            }
        }
        const double n = double(group.size());
        mean.ets_j /= n;
        mean.tts_s /= n;
        if (mlups_n) mean.mlups = mlups_sum / mlups_n;
        if (temp_n) mean.mean_temp_c = temp_sum / temp_n;
        a.series.push_back(std::move(mean));
    }

    a.reference_clock =
        reference_clock.value_or(a.series.back().clock_mhz); // map is sorted
    a.argmin_clock = argmin_action(a.series);
    for (const auto& p : a.series) {
        if (p.clock_mhz == a.argmin_clock) a.action_at_argmin = action(p);
    }
    a.normalized = normalized_variations(a.series, a.reference_clock);
    return a;
}

void write_report_csv(std::ostream& out, const SweepAnalysis& a) {
    out << "clock_mhz,ets_j,tts_s,mlups,action_js,dtts_pct,dets_pct,"
           "mean_temp_c\n";
    char buf[256];
    for (std::size_t i = 0; i < a.series.size(); ++i) {
        const auto& p = a.series[i];
        const auto& v = a.normalized[i];
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,", p.clock_mhz,
                      p.ets_j, p.tts_s);
        out << buf;
        if (p.mlups) {
            std::snprintf(buf, sizeof buf, "%.10g", *p.mlups);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.10g,%.4f,%.4f,", action(p),
                      v.dtts_pct, v.dets_pct);
        out << buf;
        if (p.mean_temp_c) {
            std::snprintf(buf, sizeof buf, "%.10g", *p.mean_temp_c);
            out << buf;
        }
        out << '\n';
    }
}

nlohmann::json report_json(const SweepAnalysis& a) {
    nlohmann::json j;
    j["reference_clock_mhz"] = a.reference_clock;
    j["argmin_clock_mhz"] = a.argmin_clock;
    j["action_at_argmin_js"] = a.action_at_argmin;
    for (const auto& v : a.normalized) {
        if (v.clock_mhz == a.argmin_clock) {
            j["savings_at_argmin"] = {{"dtts_pct", v.dtts_pct},
                                      {"dets_pct", v.dets_pct}};
        }
    }
    auto pick_json = [](const std::optional<Variation>& v) {
        if (!v) return nlohmann::json();
        return nlohmann::json{{"clock_mhz", v->clock_mhz},
                              {"dtts_pct", v->dtts_pct},
                              {"dets_pct", v->dets_pct}};
    };
    j["within_1pct_slowdown"] = pick_json(a.pick_within_slowdown(1.0));
    j["within_5pct_slowdown"] = pick_json(a.pick_within_slowdown(5.0));
    return j;
}

std::vector<SweepPoint> read_points_csv(std::istream& in) {
    std::vector<SweepPoint> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Trim and skip blanks/comments.
        std::string_view s = line;
        while (!s.empty() && (s.back() == '\r' || s.back() == ' '))
            s.remove_suffix(1);
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        if (s.empty() || s.front() == '#') continue;

        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = s.find(',', pos);
            std::string f(s.substr(pos, comma == std::string_view::npos
                                            ? std::string_view::npos
                                            : comma - pos));
            while (!f.empty() && f.front() == ' ') f.erase(f.begin());
            while (!f.empty() && f.back() == ' ') f.pop_back();
            fields.push_back(std::move(f));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        if (fields.size() < 3) {
            throw std::invalid_argument("sweep CSV line " +
                                        std::to_string(line_no) +
                                        ": expected at least 3 columns");
        }
        // Header row: first field not numeric.
        char* end = nullptr;
        const double clock = std::strtod(fields[0].c_str(), &end);
        if (end == fields[0].c_str()) {
            if (out.empty()) continue; // header
            throw std::invalid_argument("sweep CSV line " +
                                        std::to_string(line_no) +
                                        ": bad clock '" + fields[0] + "'");
        }
        auto num = [&](const std::string& f, const char* what) {
            char* e = nullptr;
            const double v = std::strtod(f.c_str(), &e);
            if (e == f.c_str() || !std::isfinite(v)) {
                throw std::invalid_argument(
                    "sweep CSV line " + std::to_string(line_no) + ": bad " +
                    what + " '" + f + "'");
            }
            return v;
        };
        SweepPoint p;
        p.clock_mhz = clock;
        p.ets_j = num(fields[1], "ets_j");
        p.tts_s = num(fields[2], "tts_s");
        if (fields.size() > 3 && !fields[3].empty())
            p.mlups = num(fields[3], "mlups");
        if (fields.size() > 4 && !fields[4].empty())
            p.mean_temp_c = num(fields[4], "mean_temp_c");
        if (fields.size() > 5 && !fields[5].empty()) p.node_id = fields[5];
        out.push_back(std::move(p));
    }
    if (out.empty()) {
        throw std::invalid_argument("sweep CSV contains no data rows");
    }
    return out;
}

} // namespace lbm::sweep
