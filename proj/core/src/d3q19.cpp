#include "lbm/d3q19.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lbm {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

void require_omega(double omega) {
    if (!(omega > 0.0 && omega < 2.0)) {
        throw std::domain_error("omega must lie in (0, 2), got " +
                                std::to_string(omega));
    }
}

} // namespace

double FluidMoments::mach() const {
    const double speed =
        std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    return speed / std::sqrt(Stencil::cs2);
}

RelaxationParams RelaxationParams::from_omega(double omega) {
    return {omega, viscosity_from_omega(omega)};
}

RelaxationParams RelaxationParams::from_viscosity(double nu) {
    return {omega_from_viscosity(nu), nu};
}

std::array<double, kQ> equilibrium(double rho, const std::array<double, 3>& u) {
    require_finite(rho, "rho");
    for (double c : u) require_finite(c, "u");
    if (!(rho > 0.0)) {
        throw std::domain_error("equilibrium requires rho > 0, got " +
                                std::to_string(rho));
    }
    std::array<double, kQ> out;
    detail::equilibrium19(rho, u[0], u[1], u[2], out.data());
    return out;
}

FluidMoments macroscopic(std::span<const double, kQ> f) {
    for (double v : f) require_finite(v, "f");
    const auto m = detail::moments19<double>(f.data());
    if (!(m.rho > 0.0)) {
        throw std::domain_error("degenerate state: rho = " +
                                std::to_string(m.rho) + " <= 0");
    }
    return {m.rho, {m.ux, m.uy, m.uz}};
}

std::array<double, kQ> collide(std::span<const double, kQ> f, double omega,
                               const FluidMoments& m) {
    require_omega(omega);
    std::array<double, kQ> out;
    const detail::Moments19<double> mm{m.rho, m.u[0], m.u[1], m.u[2]};
    detail::collide19(f.data(), omega, mm, out.data());
    return out;
}

double viscosity_from_omega(double omega) {
    require_omega(omega);
    return Stencil::cs2 * (1.0 / omega - 0.5);
}

double omega_from_viscosity(double nu) {
    if (!std::isfinite(nu) || !(nu > 0.0)) {
        throw std::domain_error("viscosity must be positive and finite, got " +
                                std::to_string(nu));
    }
    return 1.0 / (3.0 * nu + 0.5);
}

} // namespace lbm
