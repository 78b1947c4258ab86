#include "lbm/cases.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lbm {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch())
        .count();
}

void step(LatticeGrid& grid, Scheme scheme, double omega, const Boundary& b) {
    if (scheme == Scheme::Fused) {
        step_fused(grid, omega, b);
    } else {
        step_baseline(grid, omega, b);
    }
}

} // namespace

CavityCase CavityCase::make(int n, double reynolds, double u_lid) {
    if (n < 4) {
        throw std::invalid_argument("cavity size must be at least 4, got " +
                                    std::to_string(n));
    }
    if (!(std::isfinite(reynolds) && reynolds > 0.0)) {
        throw std::invalid_argument("Reynolds number must be positive");
    }
    if (!(std::isfinite(u_lid) && u_lid > 0.0)) {
        throw std::invalid_argument("lid speed must be positive");
    }
    const double mach_limit = 0.3 * std::sqrt(Stencil::cs2);
    if (u_lid > mach_limit) {
        throw std::invalid_argument(
            "low-Mach guard: u_lid/c_s must be <= 0.3 (u_lid <= " +
            std::to_string(mach_limit) + "), got u_lid = " +
            std::to_string(u_lid));
    }
    const double nu = u_lid * double(n) / reynolds;
    const double omega = omega_from_viscosity(nu);
    if (!(omega > 0.0 && omega < 2.0)) {
        throw std::invalid_argument(
            "case implies omega outside the stable range (0, 2): omega = " +
            std::to_string(omega));
    }
    return {n, reynolds, u_lid, omega};
}

double CavityCase::viscosity() const { return viscosity_from_omega(omega); }

CavityResult run_cavity(const CavityCase& c, long steps, Scheme scheme,
                        Precision precision, const CavityOptions& options) {
    if (steps < 1) {
        throw std::invalid_argument("steps must be >= 1");
    }
    LatticeGrid grid({c.n, c.n, c.n}, precision);
    grid.fill_equilibrium(1.0, {0.0, 0.0, 0.0});
    const Boundary boundary = Boundary::cavity(c.u_lid);

    CavityResult result;
    VelocityField prev = grid.velocity();

    const double t0 = now_seconds();
    long done = 0;
    for (long s = 1; s <= steps; ++s) {
        step(grid, scheme, c.omega, boundary);
        done = s;
        if (options.divergence_interval > 0 &&
            s % options.divergence_interval == 0) {
            scan_for_divergence(grid, s);
        }
        if (options.residual_interval > 0 &&
            s % options.residual_interval == 0) {
            VelocityField cur = grid.velocity();
            const double res = relative_l2_difference(prev, cur);
            result.residuals.push_back({s, res});
            prev = std::move(cur);
            if (options.stop_below > 0.0 && res < options.stop_below) {
                result.converged = true;
                break;
            }
        }
    }
    const double t1 = now_seconds();

    scan_for_divergence(grid, done);
    result.velocity = grid.velocity();
    result.stats.steps_done = done;
    result.stats.wall_seconds = t1 - t0;
    result.stats.site_updates = grid.sites() * done;
    return result;
}

FitError::FitError(double r2)
    : std::runtime_error("kinetic-energy decay is not exponential (R^2 = " +
                         std::to_string(r2) + " < 0.99)"),
      r_squared(r2) {}

TaylorGreenResult run_taylor_green(int n, double omega, double amplitude,
                                   long steps, long sample_stride) {
    if (n < 8) throw std::invalid_argument("Taylor-Green grid too small");
    if (!(omega > 0.0 && omega < 2.0)) {
        throw std::domain_error("omega must lie in (0, 2)");
    }
    if (!(amplitude > 0.0 && amplitude <= 0.05)) {
        throw std::invalid_argument(
            "amplitude must lie in (0, 0.05] lattice units");
    }
    if (sample_stride < 1 || steps < 2 * sample_stride) {
        throw std::invalid_argument("need at least two energy samples");
    }

    LatticeGrid grid({n, n, n}, Precision::Double);
    const double k = 2.0 * std::numbers::pi / double(n);
    const double a = amplitude;
    grid.fill_from([&](int x, int y, int /*z*/) {
        const double X = k * double(x);
        const double Y = k * double(y);
        // Consistent pressure field removes most of the acoustic transient:
        // p = rho A^2/4 (cos 2X + cos 2Y), rho = 1 + p / cs^2.
        const double rho =
            1.0 + 0.75 * a * a * (std::cos(2.0 * X) + std::cos(2.0 * Y));
        const std::array<double, 3> u = {a * std::sin(X) * std::cos(Y),
                                         -a * std::cos(X) * std::sin(Y), 0.0};
        return std::pair{rho, u};
    });
    const Boundary boundary = Boundary::periodic();

    auto kinetic_energy = [&]() {
        const VelocityField v = grid.velocity();
        const ScalarField rho = grid.density();
        const std::int64_t m = v.plane();
        double e = 0.0;
        for (std::int64_t s = 0; s < m; ++s) {
            const double u2 = v.data[s] * v.data[s] +
                              v.data[m + s] * v.data[m + s] +
                              v.data[2 * m + s] * v.data[2 * m + s];
            e += 0.5 * rho.data[s] * u2;
        }
        return e;
    };

    TaylorGreenResult result;
    result.energy.push_back({0, kinetic_energy()});

    const double t0 = now_seconds();
    for (long s = 1; s <= steps; ++s) {
        step_fused(grid, omega, boundary);
        if (s % sample_stride == 0) {
            result.energy.push_back({s, kinetic_energy()});
        }
        if (s % 100 == 0) scan_for_divergence(grid, s);
    }
    const double t1 = now_seconds();
    result.stats.steps_done = steps;
    result.stats.wall_seconds = t1 - t0;
    result.stats.site_updates = grid.sites() * steps;

    // Least-squares fit of ln E against t; E ~ exp(-4 nu k^2 t), so the
    // amplitude decay rate is -slope/2 and nu = (-slope/2) / (2 k^2).
    const std::size_t m = result.energy.size();
    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    for (const auto& [stp, e] : result.energy) {
        if (!(e > 0.0)) throw FitError(0.0);
        const double t = double(stp);
        const double y = std::log(e);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        syy += y * y;
    }
    const double nm = double(m);
    const double slope = (nm * sty - st * sy) / (nm * stt - st * st);
    const double ss_tot = syy - sy * sy / nm;
    const double intercept = (sy - slope * st) / nm;
    double ss_res = 0.0;
    for (const auto& [stp, e] : result.energy) {
        const double r = std::log(e) - (intercept + slope * double(stp));
        ss_res += r * r;
    }
    result.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    result.nu_measured = -slope / (4.0 * k * k);
    if (result.r_squared < 0.99) throw FitError(result.r_squared);
    return result;
}

double precision_drift(const VelocityField& run,
                       const VelocityField& reference) {
    return relative_l2_difference(run, reference);
}

} // namespace lbm
