#pragma once

#include <array>
#include <span>

#include "lbm/stencil.hpp"

namespace lbm {

namespace detail {

template <class C>
struct Moments19 {
    C rho;
    C ux, uy, uz;
};

// Density and momentum sums over one site's 19 populations.
//
// The grouping is fixed and deliberate:
//  * the 19 weights accumulate to exactly 1.0, so a rest-equilibrium site
//    recovers rho == 1.0 bitwise and stays a bitwise fixed point of the
//    collision,
//  * every group maps onto itself (or negates exactly) under the z mirror,
//    so the cavity's symmetry plane survives in floating point.
// Only additions and subtractions appear; all c_i components are -1/0/+1.
template <class C>
inline Moments19<C> moments19(const C* f) {
    const C axis = ((f[1] + f[2]) + (f[3] + f[4])) + (f[5] + f[6]);
    const C diag = (((f[7] + f[8]) + (f[9] + f[10])) +
                    ((f[11] + f[12]) + (f[13] + f[14]))) +
                   ((f[15] + f[16]) + (f[17] + f[18]));
    const C rho = (f[0] + axis) + diag;

    const C mx = ((f[1] - f[2]) + ((f[7] - f[8]) + (f[9] - f[10]))) +
                 ((f[11] - f[12]) + (f[13] - f[14]));
    const C my = ((f[3] - f[4]) + ((f[7] - f[8]) - (f[9] - f[10]))) +
                 ((f[15] - f[16]) + (f[17] - f[18]));
    const C mz = ((f[5] - f[6]) + ((f[11] - f[12]) - (f[13] - f[14]))) +
                 ((f[15] - f[16]) - (f[17] - f[18]));

    const C inv = C(1) / rho;
    return {rho, mx * inv, my * inv, mz * inv};
}

// Equilibrium for one opposite pair: f_eq = w * ((base + 4.5 t^2) +- 3 t)
// with t = c_i . u and base = 1 - 1.5 |u|^2.
template <class C>
inline void equilibrium_pair(C w, C t, C base, C& plus, C& minus) {
    const C quad = base + C(4.5) * (t * t);
    const C lin = C(3) * t;
    plus = w * (quad + lin);
    minus = w * (quad - lin);
}

// Second-order Mach truncation of the Maxwell-Boltzmann distribution,
// f_i^eq = w_i rho (1 + 3 c.u + 4.5 (c.u)^2 - 1.5 u.u) for c_s^2 = 1/3.
template <class C>
inline void equilibrium19(C rho, C ux, C uy, C uz, C* feq) {
    const C usq = (ux * ux + uy * uy) + uz * uz;
    const C base = C(1) - C(1.5) * usq;

    const C wr = rho * C(12.0 / 36.0);
    const C wa = rho * C(2.0 / 36.0);
    const C wd = rho * C(1.0 / 36.0);

    feq[0] = wr * base;
    equilibrium_pair(wa, ux, base, feq[1], feq[2]);
    equilibrium_pair(wa, uy, base, feq[3], feq[4]);
    equilibrium_pair(wa, uz, base, feq[5], feq[6]);
    equilibrium_pair(wd, ux + uy, base, feq[7], feq[8]);
    equilibrium_pair(wd, ux - uy, base, feq[9], feq[10]);
    equilibrium_pair(wd, ux + uz, base, feq[11], feq[12]);
    equilibrium_pair(wd, ux - uz, base, feq[13], feq[14]);
    equilibrium_pair(wd, uy + uz, base, feq[15], feq[16]);
    equilibrium_pair(wd, uy - uz, base, feq[17], feq[18]);
}

// BGK relaxation toward local equilibrium. Written as
//   f' = feq + (1 - omega) (f - feq)
// so that f == feq is a bitwise fixed point and omega == 1 returns feq
// bitwise; both properties are asserted by tests.
template <class C>
inline void collide19(const C* f, C omega, const Moments19<C>& m, C* out) {
    C feq[kQ];
    equilibrium19(m.rho, m.ux, m.uy, m.uz, feq);
    const C rev = C(1) - omega;
    for (int i = 0; i < kQ; ++i) {
        out[i] = feq[i] + rev * (f[i] - feq[i]);
    }
}

} // namespace detail

/// Macroscopic density and velocity at one site.
struct FluidMoments {
    double rho = 0.0;
    std::array<double, 3> u = {0.0, 0.0, 0.0};

    /// Mach number |u| / c_s.
    double mach() const;
};

/// Relaxation parameter and the kinematic viscosity it implies,
/// nu = c_s^2 (1/omega - 1/2).
struct RelaxationParams {
    double omega = 0.0;
    double nu = 0.0;

    static RelaxationParams from_omega(double omega);
    static RelaxationParams from_viscosity(double nu);
};

/// Equilibrium populations for (rho, u). Requires rho > 0, finite inputs.
std::array<double, kQ> equilibrium(double rho, const std::array<double, 3>& u);

/// Density and velocity recovered from populations. The momentum sums use
/// only additions/subtractions. Throws on non-finite input or rho <= 0.
FluidMoments macroscopic(std::span<const double, kQ> f);

/// Post-collision populations f' = (1-omega) f + omega feq(rho, u).
/// Requires omega in (0, 2).
std::array<double, kQ> collide(std::span<const double, kQ> f, double omega,
                               const FluidMoments& m);

/// nu = c_s^2 (1/omega - 1/2); omega must lie in (0, 2).
double viscosity_from_omega(double omega);

/// omega = 1 / (3 nu + 1/2); nu must be positive and finite.
double omega_from_viscosity(double nu);

} // namespace lbm
