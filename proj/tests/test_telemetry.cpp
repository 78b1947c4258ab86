#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lbm/telemetry.hpp"

using namespace lbm::telemetry;

namespace {

std::string lines_for(const GpuTrace& t) {
    std::string out;
    for (const auto& s : t.samples) {
        out += serialize_sample(s);
        out += '\n';
    }
    return out;
}

} // namespace

TEST_CASE("single-line grammar") {
    std::istringstream in(
        "0, 2024/01/15 10:00:00.000, 287.45, 1395, 1593, 52, 48, 100, 67\n");
    const auto r = parse_smi_csv(in);
    CHECK(r.parsed_lines == 1);
    CHECK(r.skipped_lines == 0);
    REQUIRE(r.traces.size() == 1);
    const auto& s = r.traces[0].samples.at(0);
    CHECK(s.gpu_index == 0);
    CHECK(s.power_w == 287.45);
    CHECK(s.clock_sm_mhz == 1395);
    CHECK(s.clock_mem_mhz == 1593);
    CHECK(s.temp_gpu_c == 52);
    CHECK(s.temp_mem_c == 48);
    CHECK(s.util_gpu_pct == 100);
    CHECK(s.util_mem_pct == 67);
    CHECK(format_timestamp_ms(s.timestamp_ms) == "2024/01/15 10:00:00.000");
}

TEST_CASE("interleaved four-GPU file groups into four traces") {
    std::string text;
    for (int k = 0; k < 10; ++k) {
        for (int gpu = 0; gpu < 4; ++gpu) {
            PowerSample s;
            s.gpu_index = gpu;
            s.timestamp_ms =
                parse_timestamp_ms("2024/01/15 10:00:00.000") + 1000LL * k;
            s.power_w = 100.0 + gpu;
            s.clock_sm_mhz = 1395;
            s.clock_mem_mhz = 1593;
            s.temp_gpu_c = 50;
            s.temp_mem_c = 45;
            s.util_gpu_pct = 100;
            s.util_mem_pct = 60;
            text += serialize_sample(s) + "\n";
        }
    }
    std::istringstream in(text);
    const auto r = parse_smi_csv(in);
    CHECK(r.parsed_lines == 40);
    REQUIRE(r.traces.size() == 4);
    for (int gpu = 0; gpu < 4; ++gpu) {
        CHECK(r.traces[gpu].gpu_index == gpu);
        CHECK(r.traces[gpu].samples.size() == 10);
        CHECK(r.traces[gpu].samples[0].power_w == 100.0 + gpu);
    }
}

TEST_CASE("corrupted lines are counted and skipped") {
    std::string text;
    for (int k = 0; k < 100; ++k) {
        PowerSample s;
        s.timestamp_ms =
            parse_timestamp_ms("2024/01/15 10:00:00.000") + 1000LL * k;
        s.power_w = 250.0;
        s.util_gpu_pct = 100;
        if (k == 57) {
            text += "0, garbage line that fails to parse\n";
        } else {
            text += serialize_sample(s) + "\n";
        }
    }
    std::istringstream in(text);
    const auto r = parse_smi_csv(in);
    CHECK(r.parsed_lines == 99);
    CHECK(r.skipped_lines == 1);
    CHECK(r.traces[0].samples.size() == 99);
}

TEST_CASE("out-of-range fields are treated as malformed") {
    std::istringstream in(
        "0, 2024/01/15 10:00:00.000, 287.45, 1395, 1593, 52, 48, 100, 67\n"
        "0, 2024/01/15 10:00:01.000, -5.0, 1395, 1593, 52, 48, 100, 67\n"
        "0, 2024/01/15 10:00:02.000, 287.45, 1395, 1593, 52, 48, 130, 67\n");
    const auto r = parse_smi_csv(in);
    CHECK(r.parsed_lines == 1);
    CHECK(r.skipped_lines == 2);
}

TEST_CASE("empty log raises, timestamp regression raises") {
    std::istringstream empty("\n\n");
    CHECK_THROWS_AS(parse_smi_csv(empty), ParseError);

    std::istringstream reversed(
        "0, 2024/01/15 10:00:05.000, 287.45, 1395, 1593, 52, 48, 100, 67\n"
        "0, 2024/01/15 10:00:04.000, 287.45, 1395, 1593, 52, 48, 100, 67\n");
    try {
        parse_smi_csv(reversed);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        CHECK(std::string(e.what()).find("GPU 0") != std::string::npos);
    }
}

TEST_CASE("parse of serialize is the identity, field for field") {
    std::mt19937 rng(21);
    std::uniform_int_distribution<int> cents(0, 40000);
    std::uniform_int_distribution<int> clock(210, 1395);
    std::uniform_int_distribution<int> temp(30, 90);
    std::uniform_int_distribution<int> util(0, 100);
    GpuTrace t;
    t.gpu_index = 2;
    std::int64_t ts = parse_timestamp_ms("2023/12/31 23:59:58.500");
    for (int k = 0; k < 200; ++k) {
        PowerSample s;
        s.gpu_index = 2;
        s.timestamp_ms = ts + 997LL * k; // deliberately jittery period
        s.power_w = cents(rng) / 100.0;
        s.clock_sm_mhz = clock(rng);
        s.clock_mem_mhz = 1593;
        s.temp_gpu_c = temp(rng);
        s.temp_mem_c = temp(rng);
        s.util_gpu_pct = util(rng);
        s.util_mem_pct = util(rng);
        t.samples.push_back(s);
    }
    std::istringstream in(lines_for(t));
    const auto r = parse_smi_csv(in);
    REQUIRE(r.traces.size() == 1);
    REQUIRE(r.traces[0].samples.size() == t.samples.size());
    for (std::size_t k = 0; k < t.samples.size(); ++k) {
        CHECK(r.traces[0].samples[k] == t.samples[k]);
    }
}

TEST_CASE("timestamp round trip across day boundaries") {
    for (const char* text :
         {"2024/01/15 10:00:00.000", "2024/02/29 23:59:59.999",
          "1999/12/31 00:00:00.001", "2038/01/19 03:14:07.000"}) {
        CHECK(format_timestamp_ms(parse_timestamp_ms(text)) == text);
    }
    CHECK_THROWS_AS(parse_timestamp_ms("15.01.2024 10:00:00.000"), ParseError);
}

TEST_CASE("plateau detection on generator ground truth") {
    SUBCASE("canonical shape: 10 s idle, 200 s busy, 10 s idle") {
        SynthSpec spec; // defaults: 60 W idle, 300 W plateau
        const auto synth = synth_trace(spec);
        const auto seg = detect_plateau(synth.trace);
        CHECK(seg.t_start_ms == synth.truth.t_start_ms);
        CHECK(seg.t_end_ms == synth.truth.t_end_ms);
        CHECK(seg.duration_s() == 200.0);
        CHECK(seg.mean_power_w == doctest::Approx(300.0));
    }
    SUBCASE("all-idle trace has no plateau") {
        SynthSpec spec;
        spec.plateau_s = 0;
        spec.ramp_s = 0;
        spec.idle_s = 30;
        const auto synth = synth_trace(spec);
        CHECK_THROWS_AS(detect_plateau(synth.trace), PlateauError);
    }
    SUBCASE("longest of two bursts wins") {
        // Concatenate a 50 s burst and a 150 s burst into one trace.
        SynthSpec a;
        a.plateau_s = 50;
        SynthSpec b;
        b.plateau_s = 150;
        auto sa = synth_trace(a);
        auto sb = synth_trace(b);
        GpuTrace merged = sa.trace;
        const std::int64_t shift =
            sa.trace.samples.back().timestamp_ms + 1000 - b.t0_ms;
        for (auto s : sb.trace.samples) {
            s.timestamp_ms += shift;
            merged.samples.push_back(s);
        }
        const auto seg = detect_plateau(merged);
        CHECK(seg.t_start_ms == sb.truth.t_start_ms + shift);
        CHECK(seg.t_end_ms == sb.truth.t_end_ms + shift);
    }
    SUBCASE("utilization-free trace falls back to the power threshold") {
        SynthSpec spec;
        spec.ramp_s = 1.0;
        auto synth = synth_trace(spec);
        for (auto& s : synth.trace.samples) {
            s.util_gpu_pct = 0.0;
            s.util_mem_pct = 0.0;
        }
        const auto seg = detect_plateau(synth.trace);
        CHECK(std::abs(double(seg.t_start_ms - synth.truth.t_start_ms)) <=
              1000.0);
        CHECK(std::abs(double(seg.t_end_ms - synth.truth.t_end_ms)) <= 1000.0);
    }
    SUBCASE("too short a trace is rejected") {
        GpuTrace t;
        t.samples.resize(4);
        CHECK_THROWS_AS(detect_plateau(t), PlateauError);
    }
}

TEST_CASE("energy integration") {
    SUBCASE("constant 300 W over 200 s is 60 kJ") {
        const auto synth = synth_trace(SynthSpec{});
        const auto seg = detect_plateau(synth.trace);
        CHECK(integrate_energy(synth.trace, seg) == doctest::Approx(60000.0));
    }
    SUBCASE("linear ramp 0 to 100 W over 10 s is 500 J") {
        GpuTrace t;
        for (int k = 0; k <= 10; ++k) {
            PowerSample s;
            s.timestamp_ms = 1000LL * k;
            s.power_w = 10.0 * k;
            t.samples.push_back(s);
        }
        PlateauSegment seg;
        seg.t_start_ms = 0;
        seg.t_end_ms = 10000;
        CHECK(integrate_energy(t, seg) == doctest::Approx(500.0));
    }
    SUBCASE("trapezoid matches a 1000x-oversampled rectangle oracle") {
        // Piecewise-linear random power curve sampled at 1 Hz; the oracle
        // integrates the same polyline with 1 ms rectangles.
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> pw(50.0, 350.0);
        std::vector<double> knots(301);
        for (auto& v : knots) v = pw(rng);
        GpuTrace t;
        for (int k = 0; k <= 300; ++k) {
            PowerSample s;
            s.timestamp_ms = 1000LL * k;
            s.power_w = knots[k];
            t.samples.push_back(s);
        }
        PlateauSegment seg;
        seg.t_start_ms = 0;
        seg.t_end_ms = 300000;
        const double got = integrate_energy(t, seg);
        double oracle = 0.0;
        for (int k = 0; k < 300; ++k) {
            for (int m = 0; m < 1000; ++m) {
                const double f = (m + 0.5) / 1000.0;
                oracle += (knots[k] + f * (knots[k + 1] - knots[k])) * 1e-3;
            }
        }
        CHECK(std::abs(got - oracle) / oracle < 1e-3);
    }
    SUBCASE("energy additivity at a shared endpoint") {
        const auto synth = synth_trace(SynthSpec{.jitter_w = 8.0, .seed = 3});
        const auto& tr = synth.trace;
        PlateauSegment whole = synth.truth;
        PlateauSegment left = whole, right = whole;
        const std::int64_t mid = whole.t_start_ms + 77000;
        left.t_end_ms = mid;
        right.t_start_ms = mid;
        const double a = integrate_energy(tr, left);
        const double b = integrate_energy(tr, right);
        const double whole_e = integrate_energy(tr, whole);
        CHECK(std::abs((a + b) - whole_e) <=
              4.0 * std::numeric_limits<double>::epsilon() * whole_e);
    }
    SUBCASE("fewer than two samples in segment") {
        const auto synth = synth_trace(SynthSpec{});
        PlateauSegment seg;
        seg.t_start_ms = synth.truth.t_start_ms;
        seg.t_end_ms = synth.truth.t_start_ms;
        CHECK_THROWS_AS(integrate_energy(synth.trace, seg),
                        std::domain_error);
    }
}

TEST_CASE("synthetic trace generator") {
    SUBCASE("zero jitter plateau energy is analytic") {
        const auto synth = synth_trace(SynthSpec{});
        CHECK(synth.analytic_ets_j == doctest::Approx(60000.0));
    }
    SUBCASE("jittered energy stays within 1% of analytic") {
        SynthSpec spec;
        spec.jitter_w = 5.0;
        spec.seed = 17;
        const auto synth = synth_trace(spec);
        const double e = integrate_energy(synth.trace, synth.truth);
        CHECK(std::abs(e - synth.analytic_ets_j) / synth.analytic_ets_j <
              0.01);
    }
    SUBCASE("halving the period doubles the sample count") {
        SynthSpec one;
        const auto a = synth_trace(one);
        SynthSpec half = one;
        half.period_s = 0.5;
        const auto b = synth_trace(half);
        CHECK(b.trace.samples.size() == 2 * a.trace.samples.size() - 1);
    }
    SUBCASE("deterministic for a fixed seed") {
        SynthSpec spec;
        spec.jitter_w = 4.0;
        spec.seed = 9;
        const auto a = synth_trace(spec);
        const auto b = synth_trace(spec);
        REQUIRE(a.trace.samples.size() == b.trace.samples.size());
        for (std::size_t k = 0; k < a.trace.samples.size(); ++k) {
            CHECK(a.trace.samples[k] == b.trace.samples[k]);
        }
    }
}

TEST_CASE("ETS scales linearly with plateau power and duration") {
    SynthSpec spec;
    const double base =
        integrate_energy(synth_trace(spec).trace, synth_trace(spec).truth);
    SynthSpec twice_p = spec;
    twice_p.plateau_w = 600.0;
    SynthSpec twice_t = spec;
    twice_t.plateau_s = 400.0;
    const auto sp = synth_trace(twice_p);
    const auto st = synth_trace(twice_t);
    CHECK(integrate_energy(sp.trace, sp.truth) == doctest::Approx(2 * base));
    CHECK(integrate_energy(st.trace, st.truth) == doctest::Approx(2 * base));
}

TEST_CASE("node report") {
    SUBCASE("four identical 300 W / 200 s GPUs sum to 240 kJ, 200 s") {
        std::vector<GpuTrace> traces;
        for (int gpu = 0; gpu < 4; ++gpu) {
            SynthSpec spec;
            spec.gpu_index = gpu;
            traces.push_back(synth_trace(spec).trace);
        }
        const auto report = node_report(traces);
        CHECK(report.per_gpu.size() == 4);
        CHECK(report.node_ets_j == doctest::Approx(240000.0));
        CHECK(report.node_tts_s == doctest::Approx(200.0));
    }
    SUBCASE("single trace: node values equal the per-GPU values") {
        std::vector<GpuTrace> traces{synth_trace(SynthSpec{}).trace};
        const auto report = node_report(traces);
        CHECK(report.node_ets_j == doctest::Approx(report.per_gpu[0].ets_j));
        CHECK(report.node_tts_s == doctest::Approx(report.per_gpu[0].tts_s));
    }
    SUBCASE("plateaus offset by 5 s produce the union span") {
        SynthSpec a;
        a.plateau_s = 100;
        SynthSpec b = a;
        b.gpu_index = 1;
        b.t0_ms = a.t0_ms + 5000;
        std::vector<GpuTrace> traces{synth_trace(a).trace,
                                     synth_trace(b).trace};
        const auto report = node_report(traces);
        CHECK(report.node_tts_s == doctest::Approx(105.0));
    }
    SUBCASE("per-GPU plateau failure names the GPU") {
        SynthSpec idle;
        idle.plateau_s = 0;
        idle.idle_s = 20;
        idle.gpu_index = 3;
        std::vector<GpuTrace> traces{synth_trace(SynthSpec{}).trace,
                                     synth_trace(idle).trace};
        try {
            node_report(traces);
            FAIL("expected PlateauError");
        } catch (const PlateauError& e) {
            CHECK(std::string(e.what()).find("GPU 3") != std::string::npos);
        }
    }
    SUBCASE("no traces is invalid") {
        CHECK_THROWS_AS(node_report({}), std::invalid_argument);
    }
}

TEST_CASE("report emission") {
    std::vector<GpuTrace> traces;
    for (int gpu = 0; gpu < 2; ++gpu) {
        SynthSpec spec;
        spec.gpu_index = gpu;
        traces.push_back(synth_trace(spec).trace);
    }
    auto report = node_report(traces);
    report.skipped_lines = 1;

    std::ostringstream csv;
    write_report_csv(csv, "node01", report);
    const std::string text = csv.str();
    CHECK(text.starts_with("node,gpu,t_start,t_end,tts_s,ets_j,mean_power_w,"
                           "mean_clock_mhz,mean_temp_c\n"));
    CHECK(text.find("node01,0,") != std::string::npos);
    CHECK(text.find("node01,1,") != std::string::npos);

    const auto j = report_json("node01", report);
    CHECK(j["node"] == "node01");
    CHECK(j["gpus"].size() == 2);
    CHECK(j["node_ets_j"] == doctest::Approx(120000.0));
    CHECK(j["skipped_lines"] == 1);
}

TEST_CASE("plateau recovery across 200 randomized specs") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> idle(30.0, 80.0);
    std::uniform_real_distribution<double> plateau(180.0, 400.0);
    std::uniform_real_distribution<double> idle_s(6.0, 20.0);
    std::uniform_real_distribution<double> plateau_s(20.0, 300.0);
    std::uniform_int_distribution<int> period_pick(0, 1);
    std::uniform_int_distribution<int> util_pick(0, 1);

    for (int n = 0; n < 200; ++n) {
        SynthSpec spec;
        spec.idle_w = idle(rng);
        spec.plateau_w = plateau(rng);
        spec.idle_s = idle_s(rng);
        spec.plateau_s = plateau_s(rng);
        spec.period_s = period_pick(rng) ? 1.0 : 0.5;
        spec.seed = 1000u + unsigned(n);
        const bool drop_util = util_pick(rng) == 1;
        // Power-threshold fallback can only pin boundaries to a sample when
        // the ramp is no longer than one period; utilization pins them
        // exactly for any ramp.
        spec.ramp_s = drop_util ? spec.period_s : 3.0;
        spec.jitter_w = 0.15 * (spec.plateau_w - spec.idle_w) *
                        std::uniform_real_distribution<double>(0, 1)(rng);

        auto synth = synth_trace(spec);
        if (drop_util) {
            for (auto& s : synth.trace.samples) {
                s.util_gpu_pct = 0.0;
                s.util_mem_pct = 0.0;
            }
        }
        const auto seg = detect_plateau(synth.trace);
        const double period_ms = spec.period_s * 1000.0;
        CHECK(std::abs(double(seg.t_start_ms - synth.truth.t_start_ms)) <=
              period_ms);
        CHECK(std::abs(double(seg.t_end_ms - synth.truth.t_end_ms)) <=
              period_ms);
    }
}
