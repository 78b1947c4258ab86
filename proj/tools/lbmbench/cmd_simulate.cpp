#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>

#include "common.hpp"

#include "lbm/cases.hpp"
#include "lbm/perfmodel.hpp"
#include "lbm/telemetry.hpp"

namespace lbmbench {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct SimulateOpts {
    std::string case_name = "cavity"; // cavity | taylor-green
    int n = 32;
    double re = 100.0;
    double u_lid = 0.05;
    double omega = 1.0;      // taylor-green
    double amplitude = 0.02; // taylor-green
    long steps = 2000;
    double stop_residual = 0.0;
    long residual_interval = 100;
    std::string scheme = "fused";
    std::string precision = "double";
    std::string out_dir = ".";
    std::string telemetry_log;
    std::string config_path;
};

// Config file fields mirror the flags; explicitly passed flags win.
void apply_config(const CLI::App& cmd, SimulateOpts& o) {
    if (o.config_path.empty()) return;
    auto in = open_input(o.config_path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config " + o.config_path + ": " +
                                    e.what());
    }
    auto load = [&](const char* flag, const char* key, auto& field) {
        if (cmd.count(flag) == 0 && cfg.contains(key)) {
            cfg.at(key).get_to(field);
        }
    };
    load("--case", "case", o.case_name);
    load("--size", "n", o.n);
    load("--re", "re", o.re);
    load("--u-lid", "u_lid", o.u_lid);
    load("--omega", "omega", o.omega);
    load("--amplitude", "amplitude", o.amplitude);
    load("--steps", "steps", o.steps);
    load("--stop-residual", "stop_residual", o.stop_residual);
    load("--residual-interval", "residual_interval", o.residual_interval);
    load("--scheme", "scheme", o.scheme);
    load("--precision", "precision", o.precision);
    load("--out-dir", "out_dir", o.out_dir);
    load("--telemetry", "telemetry_log", o.telemetry_log);
}

json residuals_json(const std::vector<lbm::ResidualSample>& residuals) {
    json arr = json::array();
    for (const auto& r : residuals) {
        arr.push_back({{"step", r.step}, {"residual", r.residual}});
    }
    return arr;
}

// Loop-only row always; a plateau row when a telemetry log provides energy.
std::vector<lbm::perf::CostReport> cost_rows(const SimulateOpts& o,
                                             const lbm::RunStats& stats) {
    std::vector<lbm::perf::CostReport> rows;
    const std::string label = o.scheme + "-" + o.precision;
    rows.push_back(lbm::perf::CostReport::make(
        label + "-loop", std::nullopt, stats.wall_seconds,
        stats.site_updates));
    if (!o.telemetry_log.empty()) {
        auto in = open_input(o.telemetry_log);
        const auto parsed = lbm::telemetry::parse_smi_csv(in);
        const auto report = lbm::telemetry::node_report(parsed.traces);
        rows.push_back(lbm::perf::CostReport::make(
            label + "-plateau", report.node_ets_j, report.node_tts_s,
            stats.site_updates));
    }
    return rows;
}

void write_reports(const fs::path& dir,
                   const std::vector<lbm::perf::CostReport>& rows,
                   const json& stats) {
    {
        auto out = open_output(dir / "cost.csv");
        lbm::perf::write_cost_csv(out, rows);
    }
    write_text(dir / "cost.json", lbm::perf::cost_json(rows).dump(2) + "\n");
    write_text(dir / "stats.json", stats.dump(2) + "\n");
}

void run_cavity_case(const SimulateOpts& o) {
    const auto c = lbm::CavityCase::make(o.n, o.re, o.u_lid);
    lbm::CavityOptions copt;
    copt.stop_below = o.stop_residual;
    copt.residual_interval = o.residual_interval;
    const auto result =
        lbm::run_cavity(c, o.steps, lbm::scheme_from_string(o.scheme),
                        lbm::precision_from_string(o.precision), copt);

    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    lbm::write_snapshot(result.velocity, dir / "velocity.bin");
    {
        auto out = open_output(dir / "centerline.csv");
        lbm::write_centerline_csv(result.velocity, out);
    }
    std::ostringstream meta;
    meta << "case: cavity\n"
         << "n: " << o.n << "\n"
         << "re: " << o.re << "\n"
         << "u_lid: " << o.u_lid << "\n"
         << "omega: " << c.omega << "\n"
         << "scheme: " << o.scheme << "\n"
         << "precision: " << o.precision << "\n"
         << "steps_done: " << result.stats.steps_done << "\n"
         << "format: u64le nx,ny,nz header + ux,uy,uz planes (f64le, x "
            "fastest)\n";
    write_text(dir / "velocity.meta.txt", meta.str());

    const auto rows = cost_rows(o, result.stats);
    json stats{{"case", "cavity"},
               {"n", o.n},
               {"re", o.re},
               {"u_lid", o.u_lid},
               {"omega", c.omega},
               {"scheme", o.scheme},
               {"precision", o.precision},
               {"steps_requested", o.steps},
               {"steps_done", result.stats.steps_done},
               {"wall_seconds", result.stats.wall_seconds},
               {"site_updates", result.stats.site_updates},
               {"mlups", result.stats.mlups()},
               {"converged", result.converged},
               {"final_residual", result.residuals.empty()
                                      ? json()
                                      : json(result.residuals.back().residual)},
               {"residuals", residuals_json(result.residuals)}};
    write_reports(dir, rows, stats);

    std::cout << "cavity " << o.n << "^3 Re=" << o.re << " " << o.scheme
              << "/" << o.precision << ": " << result.stats.steps_done
              << " steps in " << result.stats.wall_seconds << " s ("
              << result.stats.mlups() << " MLUPS)";
    if (!result.residuals.empty()) {
        std::cout << ", residual " << result.residuals.back().residual;
    }
    std::cout << (result.converged ? " [converged]" : "") << "\n";
}

void run_taylor_green_case(const SimulateOpts& o) {
    const auto result =
        lbm::run_taylor_green(o.n, o.omega, o.amplitude, o.steps);

    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    {
        auto out = open_output(dir / "energy.csv");
        out << "step,kinetic_energy\n";
        char buf[64];
        for (const auto& [step, e] : result.energy) {
            std::snprintf(buf, sizeof buf, "%ld,%.17g\n", step, e);
            out << buf;
        }
    }
    const auto rows = cost_rows(o, result.stats);
    const double nu_exact = lbm::viscosity_from_omega(o.omega);
    json stats{{"case", "taylor-green"},
               {"n", o.n},
               {"omega", o.omega},
               {"amplitude", o.amplitude},
               {"steps_done", result.stats.steps_done},
               {"wall_seconds", result.stats.wall_seconds},
               {"site_updates", result.stats.site_updates},
               {"mlups", result.stats.mlups()},
               {"nu_measured", result.nu_measured},
               {"nu_expected", nu_exact},
               {"r_squared", result.r_squared}};
    write_reports(dir, rows, stats);

    std::cout << "taylor-green " << o.n << "^3 omega=" << o.omega
              << ": nu_measured=" << result.nu_measured << " (exact "
              << nu_exact << ", R^2=" << result.r_squared << ")\n";
}

} // namespace

void register_simulate(CLI::App& app) {
    auto opts = std::make_shared<SimulateOpts>();
    CLI::App* cmd = app.add_subcommand(
        "simulate", "Run a solver case and write snapshot/stats/cost reports");
    cmd->add_option("--case", opts->case_name, "cavity | taylor-green")
        ->check(CLI::IsMember({"cavity", "taylor-green"}))
        ->capture_default_str();
    cmd->add_option("-n,--size", opts->n, "grid points per edge")
        ->capture_default_str();
    cmd->add_option("--re", opts->re, "Reynolds number (cavity)")
        ->capture_default_str();
    cmd->add_option("--u-lid", opts->u_lid, "lid speed in lattice units")
        ->capture_default_str();
    cmd->add_option("--omega", opts->omega, "relaxation rate (taylor-green)")
        ->capture_default_str();
    cmd->add_option("--amplitude", opts->amplitude,
                    "vortex amplitude (taylor-green)")
        ->capture_default_str();
    cmd->add_option("--steps", opts->steps, "time steps to run")
        ->capture_default_str();
    cmd->add_option("--stop-residual", opts->stop_residual,
                    "stop once the residual drops below this (0 = run all)")
        ->capture_default_str();
    cmd->add_option("--residual-interval", opts->residual_interval,
                    "steps between residual samples")
        ->capture_default_str();
    cmd->add_option("--scheme", opts->scheme, "baseline | fused")
        ->check(CLI::IsMember({"baseline", "fused"}))
        ->capture_default_str();
    cmd->add_option("--precision", opts->precision,
                    "double | single | mixed")
        ->check(CLI::IsMember({"double", "single", "mixed"}))
        ->capture_default_str();
    cmd->add_option("-o,--out-dir", opts->out_dir, "output directory")
        ->capture_default_str();
    cmd->add_option("--telemetry", opts->telemetry_log,
                    "nvidia-smi log supplying run energy");
    cmd->add_option("-c,--config", opts->config_path,
                    "JSON config file (explicit flags win)");

    cmd->callback([cmd, opts] {
        apply_config(*cmd, *opts);
        if (opts->case_name == "cavity") {
            run_cavity_case(*opts);
        } else {
            run_taylor_green_case(*opts);
        }
    });
}

} // namespace lbmbench
