#pragma once

#include <utility>
#include <vector>

#include "lbm/grid.hpp"
#include "lbm/stepping.hpp"

namespace lbm {

/// Lid-driven cavity configuration. omega is derived from Re = u_lid N / nu,
/// so the Reynolds relation holds by construction.
struct CavityCase {
    int n = 0;
    double reynolds = 0.0;
    double u_lid = 0.0;
    double omega = 0.0;

    /// Validates the low-Mach guard (u_lid/c_s <= 0.3) and derives omega.
    static CavityCase make(int n, double reynolds, double u_lid);

    double viscosity() const;
};

struct RunStats {
    long steps_done = 0;
    double wall_seconds = 0.0;
    std::int64_t site_updates = 0;

    double mlups() const {
        return wall_seconds > 0.0
                   ? double(site_updates) / wall_seconds / 1e6
                   : 0.0;
    }
};

struct ResidualSample {
    long step = 0;
    double residual = 0.0;
};

struct CavityOptions {
    long residual_interval = 100;   // relative L2 velocity change window
    long divergence_interval = 100; // NaN/Inf scan period
    double stop_below = 0.0;        // stop once residual < stop_below (0 = off)
};

struct CavityResult {
    VelocityField velocity;
    RunStats stats;
    std::vector<ResidualSample> residuals;
    bool converged = false;
};

/// Run the cavity for `steps` steps (or until the residual drops under
/// options.stop_below). Wall time covers the stepping loop only.
CavityResult run_cavity(const CavityCase& c, long steps, Scheme scheme,
                        Precision precision, const CavityOptions& options = {});

/// Kinetic-energy decay fit failed (R^2 below threshold).
struct FitError : std::runtime_error {
    double r_squared;
    explicit FitError(double r2);
};

struct TaylorGreenResult {
    double nu_measured = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<long, double>> energy; // (step, kinetic energy)
    RunStats stats;
};

/// Periodic n^3 grid seeded with the 2-D Taylor-Green vortex
/// u = A (sin X cos Y, -cos X sin Y, 0), X = 2 pi x / n. Fits the
/// exponential kinetic-energy decay and returns the implied viscosity
/// nu = decay_rate / (2 k^2), where decay_rate is the amplitude rate and
/// k = 2 pi / n. Runs fused/double. Throws FitError when R^2 < 0.99.
TaylorGreenResult run_taylor_green(int n, double omega, double amplitude,
                                   long steps, long sample_stride = 10);

/// Relative L2 divergence of a run's velocity field from a reference run,
/// ||u_run - u_ref||_2 / ||u_ref||_2. Throws on shape mismatch.
double precision_drift(const VelocityField& run, const VelocityField& reference);

} // namespace lbm
