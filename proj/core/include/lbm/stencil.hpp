#pragma once

#include <array>

namespace lbm {

/// Number of discrete velocities in the D3Q19 stencil.
inline constexpr int kQ = 19;

/// D3Q19 stencil constants.
///
/// Direction layout: rest direction first (index 0), then the 6 axis
/// directions, then the 12 edge diagonals. Opposite directions are stored
/// adjacently, so opposite(i) needs no lookup table. The weights are the
/// unique set satisfying weight normalization and second-order isotropy
/// (rest 1/3, axis 1/18, diagonal 1/36).
struct Stencil {
    /// Discrete velocities c_i; every component is -1, 0 or +1.
    static constexpr std::array<std::array<int, 3>, kQ> velocity = {{
        {0, 0, 0},
        {1, 0, 0},
        {-1, 0, 0},
        {0, 1, 0},
        {0, -1, 0},
        {0, 0, 1},
        {0, 0, -1},
        {1, 1, 0},
        {-1, -1, 0},
        {1, -1, 0},
        {-1, 1, 0},
        {1, 0, 1},
        {-1, 0, -1},
        {1, 0, -1},
        {-1, 0, 1},
        {0, 1, 1},
        {0, -1, -1},
        {0, 1, -1},
        {0, -1, 1},
    }};

    /// Weights as exact integer numerators over a common denominator of 36,
    /// so the stencil identities can be checked in integer arithmetic.
    static constexpr std::array<int, kQ> weight_numerator = {
        12, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    static constexpr int weight_denominator = 36;

    /// Weights w_i as doubles.
    static constexpr std::array<double, kQ> weight = {
        12.0 / 36.0, 2.0 / 36.0, 2.0 / 36.0, 2.0 / 36.0, 2.0 / 36.0,
        2.0 / 36.0,  2.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0,
        1.0 / 36.0,  1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0,
        1.0 / 36.0,  1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0};

    /// Lattice speed of sound squared, c_s^2 = 1/3.
    static constexpr double cs2 = 1.0 / 3.0;

    /// Index of the direction with c = -c_i.
    static constexpr int opposite(int i) noexcept {
        return i == 0 ? 0 : ((i & 1) ? i + 1 : i - 1);
    }

    /// Index of the direction with the z component negated. The lid-driven
    /// cavity is symmetric under this reflection, which some tests check
    /// bitwise.
    static constexpr int mirror_z(int i) noexcept {
        constexpr std::array<int, kQ> map = {0,  1,  2,  3,  4,  6,  5,
                                             7,  8,  9,  10, 13, 14, 11,
                                             12, 17, 18, 15, 16};
        return map[i];
    }
};

} // namespace lbm
