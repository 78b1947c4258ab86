#pragma once

#include <stdexcept>
#include <string>

#include "lbm/grid.hpp"

namespace lbm {

/// Non-finite population found while stepping.
struct DivergenceError : std::runtime_error {
    long step;
    int x, y, z, direction;

    DivergenceError(long step_, int x_, int y_, int z_, int dir)
        : std::runtime_error("non-finite population at step " +
                             std::to_string(step_) + ", site (" +
                             std::to_string(x_) + ", " + std::to_string(y_) +
                             ", " + std::to_string(z_) + "), direction " +
                             std::to_string(dir)),
          step(step_), x(x_), y(y_), z(z_), direction(dir) {}
};

/// One time step as two separate passes: stream the active buffer into the
/// inactive one (boundary rules applied in flight), then collide in place,
/// then swap.
void step_baseline(LatticeGrid& grid, double omega, const Boundary& boundary);

/// One time step as a single sweep: gather the 19 incoming populations per
/// site (pull), collide with the identical arithmetic, write to the inactive
/// buffer, swap. Produces the same populations as step_baseline; bitwise
/// identical in double and single modes.
void step_fused(LatticeGrid& grid, double omega, const Boundary& boundary);

/// Scan the active buffer; throws DivergenceError at the first non-finite
/// population, reporting `step` as the failing step.
void scan_for_divergence(const LatticeGrid& grid, long step);

namespace detail {

/// Streaming pass only (baseline pass 1): active -> inactive, bounce-back
/// and lid correction applied, no collision, no swap. Exposed so boundary
/// reflection can be tested against hand-built tables.
void stream_pass(LatticeGrid& grid, const Boundary& boundary);

/// Collision pass only (baseline pass 2): in place on the inactive buffer.
void collide_pass(LatticeGrid& grid, double omega);

} // namespace detail

} // namespace lbm
