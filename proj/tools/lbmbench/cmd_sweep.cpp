#include <algorithm>
#include <cstdio>
#include <iostream>
#include <memory>
#include <regex>
#include <set>

#include "common.hpp"

#include "lbm/sweep.hpp"
#include "lbm/telemetry.hpp"

namespace lbmbench {

namespace {

namespace fs = std::filesystem;

struct SweepOpts {
    std::string points_csv;
    std::string logs_dir;
    double reference = 0.0; // 0 = maximum clock present
    std::string out_prefix = "sweep_report";
    double util_min = 90.0;
};

// Directory layout <clock>mhz/<node>.nvidiasmi.txt; one point per
// (clock, node) with node-level ETS/TTS and the mean plateau temperature.
std::vector<lbm::sweep::SweepPoint> points_from_logs(const SweepOpts& o) {
    using namespace lbm::telemetry;
    const std::regex clock_dir("([0-9]+(\\.[0-9]+)?)mhz",
                               std::regex::icase);
    std::vector<lbm::sweep::SweepPoint> points;

    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(o.logs_dir)) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    PlateauConfig config;
    config.util_min_pct = o.util_min;

    for (const auto& dir : dirs) {
        std::smatch m;
        const std::string name = dir.filename().string();
        if (!std::regex_match(name, m, clock_dir)) continue;
        const double clock = std::stod(m[1].str());

        std::vector<fs::path> logs;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().string().ends_with(".nvidiasmi.txt")) {
                logs.push_back(entry.path());
            }
        }
        std::sort(logs.begin(), logs.end());
        for (const auto& log : logs) {
            auto in = open_input(log);
            const auto parsed = parse_smi_csv(in);
            const auto report = node_report(parsed.traces, config);
            lbm::sweep::SweepPoint p;
            p.clock_mhz = clock;
            p.ets_j = report.node_ets_j;
            p.tts_s = report.node_tts_s;
            double temp = 0.0;
            for (const auto& g : report.per_gpu)
                temp += g.plateau.mean_temp_c;
            p.mean_temp_c = temp / double(report.per_gpu.size());
            p.node_id = node_name(log);
            points.push_back(std::move(p));
        }
    }
    if (points.empty()) {
        throw std::invalid_argument("no <clock>mhz/<node>.nvidiasmi.txt logs "
                                    "under " +
                                    o.logs_dir);
    }
    return points;
}

} // namespace

void register_sweep(CLI::App& app) {
    auto opts = std::make_shared<SweepOpts>();
    CLI::App* cmd = app.add_subcommand(
        "sweep",
        "Analyze a clock scan: action metric, optimal work point, savings");
    auto* points_opt = cmd->add_option(
        "-p,--points", opts->points_csv,
        "CSV of sweep points (clock_mhz,ets_j,tts_s[,mlups,temp,node])");
    auto* logs_opt =
        cmd->add_option("-l,--logs-dir", opts->logs_dir,
                        "directory of per-clock telemetry logs");
    points_opt->excludes(logs_opt);
    cmd->add_option("--reference", opts->reference,
                    "normalization clock in MHz (default: maximum present)");
    cmd->add_option("--util-min", opts->util_min,
                    "plateau utilization threshold for --logs-dir")
        ->capture_default_str();
    cmd->add_option("-o,--out-prefix", opts->out_prefix,
                    "output prefix for .csv/.json")
        ->capture_default_str();

    cmd->callback([opts, points_opt, logs_opt] {
        const SweepOpts& o = *opts;
        if (points_opt->count() == 0 && logs_opt->count() == 0) {
            throw CLI::RequiredError("--points or --logs-dir");
        }

        std::vector<lbm::sweep::SweepPoint> points;
        if (!o.points_csv.empty()) {
            auto in = open_input(o.points_csv);
            points = lbm::sweep::read_points_csv(in);
        } else {
            points = points_from_logs(o);
        }

        std::optional<double> reference;
        if (o.reference > 0.0) reference = o.reference;
        auto analysis = lbm::sweep::analyze(points, reference);

        auto json = lbm::sweep::report_json(analysis);
        // Cross-node spread when several nodes share the clock grid.
        std::set<std::string> node_ids;
        for (const auto& p : points)
            node_ids.insert(p.node_id.value_or(""));
        if (node_ids.size() >= 2) {
            json["max_node_action_spread_pct"] =
                100.0 * lbm::sweep::node_variability(points).max_spread;
        }

        {
            auto out = open_output(o.out_prefix + ".csv");
            lbm::sweep::write_report_csv(out, analysis);
        }
        write_text(o.out_prefix + ".json", json.dump(2) + "\n");

        std::printf("reference clock: %.0f MHz\n", analysis.reference_clock);
        std::printf("argmin action:   %.0f MHz (%.4g J*s)\n",
                    analysis.argmin_clock, analysis.action_at_argmin);
        auto describe = [](const char* budget,
                           const std::optional<lbm::sweep::Variation>& v) {
            if (v) {
                std::printf("%s: %.0f MHz (%+.2f%% time, %+.2f%% energy)\n",
                            budget, v->clock_mhz, v->dtts_pct, v->dets_pct);
            } else {
                std::printf("%s: none\n", budget);
            }
        };
        describe("<=1% slowdown pick", analysis.pick_within_slowdown(1.0));
        describe("<=5% slowdown pick", analysis.pick_within_slowdown(5.0));
    });
}

} // namespace lbmbench
