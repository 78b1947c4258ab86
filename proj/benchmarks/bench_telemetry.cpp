#include <benchmark/benchmark.h>

#include <sstream>

#include "lbm/telemetry.hpp"

using namespace lbm::telemetry;

namespace {

std::string make_log(int gpus, double seconds) {
    std::string text;
    for (int gpu = 0; gpu < gpus; ++gpu) {
        SynthSpec spec;
        spec.gpu_index = gpu;
        spec.plateau_s = seconds;
        spec.jitter_w = 6.0;
        spec.seed = 100u + unsigned(gpu);
        const auto synth = synth_trace(spec);
        for (const auto& s : synth.trace.samples) {
            text += serialize_sample(s);
            text += '\n';
        }
    }
    return text;
}

void BM_ParseLog(benchmark::State& state) {
    const std::string log = make_log(4, double(state.range(0)));
    for (auto _ : state) {
        std::istringstream in(log);
        auto parsed = parse_smi_csv(in);
        benchmark::DoNotOptimize(parsed.parsed_lines);
    }
    state.SetItemsProcessed(state.iterations() *
                            std::count(log.begin(), log.end(), '\n'));
}

void BM_NodeReport(benchmark::State& state) {
    const std::string log = make_log(4, double(state.range(0)));
    std::istringstream in(log);
    const auto parsed = parse_smi_csv(in);
    for (auto _ : state) {
        auto report = node_report(parsed.traces);
        benchmark::DoNotOptimize(report.node_ets_j);
    }
    state.SetItemsProcessed(state.iterations() * parsed.parsed_lines);
}

} // namespace

BENCHMARK(BM_ParseLog)->Arg(200)->Arg(2000);
BENCHMARK(BM_NodeReport)->Arg(200)->Arg(2000);

BENCHMARK_MAIN();
