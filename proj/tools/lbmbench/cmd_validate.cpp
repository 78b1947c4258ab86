#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <random>

#include "common.hpp"

#include "lbm/cases.hpp"

namespace lbmbench {

namespace {

struct ValidateOpts {
    int tg_n = 64;
    long tg_steps = 600;
    int cavity_n = 32;
    double cavity_re = 100.0;
    long cavity_max_steps = 60000;
    double perturb_weight = 0.0; // test hook: offsets w_1 in the checks
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

using lbm::kQ;
using lbm::Stencil;

CheckResult timed(const std::string& name,
                  const std::function<std::pair<bool, std::string>()>& body) {
    CheckResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        auto [pass, detail] = body();
        r.pass = pass;
        r.detail = std::move(detail);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return r;
}

std::pair<bool, std::string> check_stencil(double perturb) {
    std::array<double, kQ> w{};
    for (int i = 0; i < kQ; ++i) w[i] = Stencil::weight[i];
    w[1] += perturb;

    double sum = 0.0;
    double first[3] = {0, 0, 0};
    double second[3][3] = {};
    for (int i = 0; i < kQ; ++i) {
        sum += w[i];
        for (int a = 0; a < 3; ++a) {
            first[a] += w[i] * Stencil::velocity[i][a];
            for (int b = 0; b < 3; ++b)
                second[a][b] += w[i] * Stencil::velocity[i][a] *
                                Stencil::velocity[i][b];
        }
    }
    double err = std::abs(sum - 1.0);
    for (int a = 0; a < 3; ++a) {
        err = std::max(err, std::abs(first[a]));
        for (int b = 0; b < 3; ++b) {
            const double want = a == b ? Stencil::cs2 : 0.0;
            err = std::max(err, std::abs(second[a][b] - want));
        }
    }
    for (int i = 0; i < kQ; ++i) {
        if (Stencil::opposite(Stencil::opposite(i)) != i) {
            return {false, "opposite is not an involution"};
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "max identity error %.3g", err);
    return {err <= 1e-15, buf};
}

std::pair<bool, std::string> check_moments() {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> rho_d(0.5, 2.0);
    std::uniform_real_distribution<double> u_d(-0.1, 0.1);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const double rho = rho_d(rng);
        const std::array<double, 3> u = {u_d(rng), u_d(rng), u_d(rng)};
        const auto f = lbm::equilibrium(rho, u);
        double s = 0, m[3] = {0, 0, 0};
        for (int i = 0; i < kQ; ++i) {
            s += f[i];
            for (int a = 0; a < 3; ++a)
                m[a] += f[i] * Stencil::velocity[i][a];
        }
        worst = std::max(worst, std::abs(s - rho) / (eps * rho));
        for (int a = 0; a < 3; ++a)
            worst =
                std::max(worst, std::abs(m[a] - rho * u[a]) / (eps * rho));

        const auto out = lbm::collide(f, 1.3, {rho, u});
        double s2 = 0, m2[3] = {0, 0, 0};
        for (int i = 0; i < kQ; ++i) {
            s2 += out[i];
            for (int a = 0; a < 3; ++a)
                m2[a] += out[i] * Stencil::velocity[i][a];
        }
        worst = std::max(worst, std::abs(s2 - s) / (eps * rho));
        for (int a = 0; a < 3; ++a)
            worst = std::max(worst, std::abs(m2[a] - m[a]) / (eps * rho));
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "worst error %.1f eps (budget 16)", worst);
    return {worst <= 16.0, buf};
}

std::pair<bool, std::string> check_fixed_point() {
    lbm::LatticeGrid grid({8, 8, 8}, lbm::Precision::Double);
    grid.fill_equilibrium(1.0, {0, 0, 0});
    lbm::LatticeGrid ref = grid;
    for (int s = 0; s < 1000; ++s)
        lbm::step_fused(grid, 1.6, lbm::Boundary::cavity(0.0));
    if (!lbm::LatticeGrid::bitwise_equal(grid, ref)) {
        return {false, "rest state drifted (no-slip box)"};
    }
    for (int s = 0; s < 1000; ++s)
        lbm::step_baseline(grid, 0.7, lbm::Boundary::periodic());
    return {lbm::LatticeGrid::bitwise_equal(grid, ref),
            "bitwise stable over 1000 steps, both schemes"};
}

std::pair<bool, std::string> check_scheme_equivalence() {
    const int n = 16;
    lbm::LatticeGrid a({n, n, n}, lbm::Precision::Double);
    lbm::LatticeGrid b({n, n, n}, lbm::Precision::Double);
    const double k = 2.0 * 3.14159265358979323846 / n;
    auto field = [&](int x, int y, int z) {
        const std::array<double, 3> u = {
            0.03 * std::sin(k * x) * std::cos(k * y),
            -0.02 * std::cos(k * y) * std::sin(k * z),
            0.025 * std::sin(k * z) * std::cos(k * x)};
        return std::pair{1.0, u};
    };
    a.fill_from(field);
    b.fill_from(field);
    for (int s = 0; s < 50; ++s) {
        lbm::step_baseline(a, 1.2, lbm::Boundary::periodic());
        lbm::step_fused(b, 1.2, lbm::Boundary::periodic());
    }
    return {lbm::LatticeGrid::bitwise_equal(a, b),
            "50 steps on 16^3, double: populations bitwise equal"};
}

std::pair<bool, std::string> check_taylor_green(const ValidateOpts& o) {
    char buf[160];
    std::string detail;
    bool pass = true;
    for (double omega : {0.8, 1.0, 1.2}) {
        const auto r = lbm::run_taylor_green(o.tg_n, omega, 0.02, o.tg_steps);
        const double exact = lbm::viscosity_from_omega(omega);
        const double err = std::abs(r.nu_measured - exact) / exact;
        std::snprintf(buf, sizeof buf, "%somega %.1f: err %.2f%%",
                      detail.empty() ? "" : ", ", omega, err * 100);
        detail += buf;
        pass = pass && err < 0.02 && r.r_squared >= 0.99;
    }
    return {pass, detail};
}

std::pair<bool, std::string> check_cavity(const ValidateOpts& o) {
    const auto c = lbm::CavityCase::make(o.cavity_n, o.cavity_re, 0.05);
    lbm::CavityOptions copt;
    copt.stop_below = 1e-7;
    const auto r = lbm::run_cavity(c, o.cavity_max_steps, lbm::Scheme::Fused,
                                   lbm::Precision::Double, copt);
    const double asym = lbm::mirror_z_asymmetry(r.velocity);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "residual %.2e after %ld steps, mirror asymmetry %.2e",
                  r.residuals.empty() ? 1.0 : r.residuals.back().residual,
                  r.stats.steps_done, asym);
    return {r.converged && asym < 1e-12, buf};
}

} // namespace

void register_validate(CLI::App& app) {
    auto opts = std::make_shared<ValidateOpts>();
    CLI::App* cmd = app.add_subcommand(
        "validate", "Run the physics release gate and print a check table");
    cmd->add_option("--tg-n", opts->tg_n, "Taylor-Green grid edge")
        ->capture_default_str();
    cmd->add_option("--tg-steps", opts->tg_steps, "Taylor-Green steps")
        ->capture_default_str();
    cmd->add_option("--cavity-n", opts->cavity_n, "cavity grid edge")
        ->capture_default_str();
    cmd->add_option("--cavity-re", opts->cavity_re, "cavity Reynolds number")
        ->capture_default_str();
    cmd->add_option("--cavity-max-steps", opts->cavity_max_steps,
                    "cavity step budget")
        ->capture_default_str();
    cmd->add_option("--perturb-weight", opts->perturb_weight,
                    "test hook: offset added to w[1] in the stencil check")
        ->group("");

    cmd->callback([opts] {
        const ValidateOpts& o = *opts;
        std::vector<CheckResult> results;
        results.push_back(timed("stencil-identities", [&] {
            return check_stencil(o.perturb_weight);
        }));
        results.push_back(timed("moment-identities", check_moments));
        results.push_back(timed("rest-fixed-point", check_fixed_point));
        results.push_back(
            timed("fused-baseline-equivalence", check_scheme_equivalence));
        results.push_back(timed("taylor-green-viscosity",
                                [&] { return check_taylor_green(o); }));
        results.push_back(
            timed("cavity-convergence-symmetry", [&] { return check_cavity(o); }));

        bool all = true;
        for (const auto& r : results) {
            std::printf("[%s] %-28s %7.1fs  %s\n", r.pass ? "PASS" : "FAIL",
                        r.name.c_str(), r.seconds, r.detail.c_str());
            all = all && r.pass;
        }
        if (!all) throw ExitWith{kExitDomain};
    });
}

} // namespace lbmbench
