#include <cstdio>
#include <iostream>
#include <memory>

#include "common.hpp"

#include "lbm/perfmodel.hpp"

namespace lbmbench {

namespace {

struct PerfOpts {
    double ops = lbm::perf::kOpsPerUpdate;
    double bytes = 0.0; // 0 = derive from scheme/precision
    std::string scheme = "fused";
    std::string precision = "double";
    double bandwidth_gbs = 1600.0;
    int gpus = 1;
    int gpus_per_node = 4;
    double ets_kj = 0.0;       // optional cost input
    double updates = 0.0;      // optional cost input (site updates)
    std::string format = "text";
};

} // namespace

void register_perf(CLI::App& app) {
    auto opts = std::make_shared<PerfOpts>();
    CLI::App* cmd = app.add_subcommand(
        "perf", "Roofline / arithmetic-intensity calculator");
    cmd->add_option("--ops", opts->ops, "operations per site update")
        ->capture_default_str();
    cmd->add_option("--bytes", opts->bytes,
                    "bytes per site update (0 = derive from scheme/precision)")
        ->capture_default_str();
    cmd->add_option("--scheme", opts->scheme, "baseline | fused")
        ->check(CLI::IsMember({"baseline", "fused"}))
        ->capture_default_str();
    cmd->add_option("--precision", opts->precision, "double | single | mixed")
        ->check(CLI::IsMember({"double", "single", "mixed"}))
        ->capture_default_str();
    cmd->add_option("--bandwidth-gbs", opts->bandwidth_gbs,
                    "per-GPU memory bandwidth, GB/s")
        ->capture_default_str();
    cmd->add_option("--gpus", opts->gpus, "GPUs used")
        ->capture_default_str();
    cmd->add_option("--gpus-per-node", opts->gpus_per_node,
                    "GPUs available per node")
        ->capture_default_str();
    cmd->add_option("--ets-kj", opts->ets_kj,
                    "measured energy in kJ (enables the cost metric)");
    cmd->add_option("--updates", opts->updates,
                    "total site updates for the cost metric");
    cmd->add_option("--format", opts->format, "text | json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    cmd->callback([opts] {
        const PerfOpts& o = *opts;
        lbm::perf::KernelProfile profile;
        if (o.bytes > 0.0) {
            profile.ops_per_update = o.ops;
            profile.bytes_per_update = o.bytes;
            profile.label = "custom";
        } else {
            profile = lbm::perf::canonical_profile(
                lbm::scheme_from_string(o.scheme),
                lbm::precision_from_string(o.precision));
            profile.ops_per_update = o.ops;
        }
        lbm::perf::MachineSpec machine;
        machine.mem_bandwidth_bytes_per_s = o.bandwidth_gbs * 1e9;
        machine.gpus_per_node = o.gpus_per_node;

        const double ai = lbm::perf::arithmetic_intensity(profile);
        const auto cap = lbm::perf::roofline_cap(profile, machine, o.gpus);

        std::optional<double> cost;
        if (o.ets_kj > 0.0 && o.updates > 0.0) {
            cost = lbm::perf::operation_cost(o.ets_kj * 1e3,
                                             std::int64_t(o.updates));
        }

        if (o.format == "json") {
            nlohmann::json j{{"label", profile.label},
                             {"ops_per_update", profile.ops_per_update},
                             {"bytes_per_update", profile.bytes_per_update},
                             {"arithmetic_intensity", ai},
                             {"bandwidth_gbs", o.bandwidth_gbs},
                             {"gpus", o.gpus},
                             {"flops_cap", cap.flops},
                             {"gflops_cap", cap.gflops()},
                             {"mlups_cap", cap.mlups()}};
            if (cost) j["cost_j_per_gupdate"] = *cost;
            std::cout << j.dump(2) << "\n";
        } else {
            std::printf("profile:              %s (%.0f ops, %.0f B per update)\n",
                        profile.label.c_str(), profile.ops_per_update,
                        profile.bytes_per_update);
            std::printf("arithmetic intensity: %.4f ops/B\n", ai);
            std::printf("roofline cap:         %.1f GFLOPS, %.1f MLUPS "
                        "(%d GPU%s @ %.0f GB/s)\n",
                        cap.gflops(), cap.mlups(), o.gpus,
                        o.gpus == 1 ? "" : "s", o.bandwidth_gbs);
            if (cost) {
                std::printf("operation cost:       %.1f J per 1e9 updates\n",
                            *cost);
            }
        }
    });
}

} // namespace lbmbench
