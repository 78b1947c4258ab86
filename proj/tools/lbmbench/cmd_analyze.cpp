#include <iostream>
#include <memory>
#include <vector>

#include "common.hpp"

#include "lbm/telemetry.hpp"

namespace lbmbench {

namespace {

namespace fs = std::filesystem;
using namespace lbm::telemetry;

struct AnalyzeOpts {
    std::vector<std::string> logs;
    double util_min = 90.0;
    double power_fraction = 0.5;
    int min_run = 3;
    std::string out_prefix = "energy_report";
};

} // namespace

void register_analyze(CLI::App& app) {
    auto opts = std::make_shared<AnalyzeOpts>();
    CLI::App* cmd = app.add_subcommand(
        "analyze",
        "Parse nvidia-smi logs, detect compute plateaus, report ETS/TTS");
    cmd->add_option("logs", opts->logs, "monitoring logs (<node>.nvidiasmi.txt)")
        ->required()
        ->expected(-1);
    cmd->add_option("--util-min", opts->util_min,
                    "plateau utilization threshold, percent")
        ->capture_default_str();
    cmd->add_option("--power-fraction", opts->power_fraction,
                    "fallback power threshold fraction")
        ->capture_default_str();
    cmd->add_option("--min-run", opts->min_run,
                    "shortest acceptable plateau, samples")
        ->capture_default_str();
    cmd->add_option("-o,--out-prefix", opts->out_prefix,
                    "output prefix for .json/.csv")
        ->capture_default_str();

    cmd->callback([opts] {
        const AnalyzeOpts& o = *opts;
        PlateauConfig config;
        config.util_min_pct = o.util_min;
        config.power_fraction = o.power_fraction;
        config.min_run = o.min_run;

        nlohmann::json nodes = nlohmann::json::array();
        std::string csv;
        bool domain_failed = false, io_failed = false, first_csv = true;

        for (const auto& path : o.logs) {
            const std::string node = node_name(path);
            try {
                auto in = open_input(path);
                const auto parsed = parse_smi_csv(in);
                auto report = node_report(parsed.traces, config);
                report.skipped_lines = parsed.skipped_lines;

                nodes.push_back(report_json(node, report));
                std::ostringstream rows;
                write_report_csv(rows, node, report, first_csv);
                csv += rows.str();
                first_csv = false;

                std::cout << node << ": " << report.per_gpu.size()
                          << " GPUs, node ETS " << report.node_ets_j
                          << " J, node TTS " << report.node_tts_s << " s";
                if (report.skipped_lines > 0) {
                    std::cout << " (" << report.skipped_lines
                              << " lines skipped)";
                }
                std::cout << "\n";
            } catch (const std::ios_base::failure& e) {
                std::cerr << node << ": " << e.what() << "\n";
                io_failed = true;
            } catch (const std::exception& e) {
                std::cerr << node << ": " << e.what() << "\n";
                domain_failed = true;
            }
        }

        // Partial results are still written when some logs failed.
        if (!nodes.empty()) {
            write_text(o.out_prefix + ".json",
                       nlohmann::json{{"nodes", nodes}}.dump(2) + "\n");
            write_text(o.out_prefix + ".csv", csv);
        }
        if (io_failed) throw ExitWith{kExitIo};
        if (domain_failed || nodes.empty()) throw ExitWith{kExitDomain};
    });
}

} // namespace lbmbench
