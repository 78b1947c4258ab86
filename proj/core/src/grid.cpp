#include "lbm/grid.hpp"

#include <cstring>
#include <stdexcept>

namespace lbm {

const char* to_string(Precision p) {
    switch (p) {
    case Precision::Double: return "double";
    case Precision::Single: return "single";
    case Precision::Mixed: return "mixed";
    }
    return "?";
}

const char* to_string(Scheme s) {
    return s == Scheme::Baseline ? "baseline" : "fused";
}

Precision precision_from_string(const std::string& s) {
    if (s == "double") return Precision::Double;
    if (s == "single") return Precision::Single;
    if (s == "mixed") return Precision::Mixed;
    throw std::invalid_argument("unknown precision '" + s +
                                "' (double|single|mixed)");
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "baseline") return Scheme::Baseline;
    if (s == "fused") return Scheme::Fused;
    throw std::invalid_argument("unknown scheme '" + s +
                                "' (baseline|fused)");
}

LatticeGrid::LatticeGrid(Dims dims, Precision mode)
    : dims_(dims), mode_(mode) {
    if (dims.nx < 3 || dims.ny < 3 || dims.nz < 3) {
        throw std::invalid_argument("grid must be at least 3 sites per axis");
    }
    const std::int64_t n = kQ * dims.sites();
    if (mode == Precision::Double) {
        f64_[0].assign(n, 0.0);
        f64_[1].assign(n, 0.0);
    } else {
        f32_[0].assign(n, 0.0f);
        f32_[1].assign(n, 0.0f);
    }
}

template <class S, class C>
void LatticeGrid::fill_equilibrium_impl(S* buf, double rho0,
                                        const std::array<double, 3>& u0) {
    C feq[kQ];
    detail::equilibrium19(C(rho0), C(u0[0]), C(u0[1]), C(u0[2]), feq);
    const std::int64_t n = sites();
    for (int i = 0; i < kQ; ++i) {
        const S v = static_cast<S>(feq[i]);
        S* plane = buf + std::int64_t(i) * n;
        for (std::int64_t s = 0; s < n; ++s) plane[s] = v;
    }
}

void LatticeGrid::fill_equilibrium(double rho0,
                                   const std::array<double, 3>& u0) {
    if (!(rho0 > 0.0)) {
        throw std::domain_error("initial density must be positive");
    }
    switch (mode_) {
    case Precision::Double:
        fill_equilibrium_impl<double, double>(f64_[active_].data(), rho0, u0);
        std::fill(f64_[active_ ^ 1].begin(), f64_[active_ ^ 1].end(), 0.0);
        break;
    case Precision::Single:
        fill_equilibrium_impl<float, float>(f32_[active_].data(), rho0, u0);
        std::fill(f32_[active_ ^ 1].begin(), f32_[active_ ^ 1].end(), 0.0f);
        break;
    case Precision::Mixed:
        fill_equilibrium_impl<float, double>(f32_[active_].data(), rho0, u0);
        std::fill(f32_[active_ ^ 1].begin(), f32_[active_ ^ 1].end(), 0.0f);
        break;
    }
}

namespace {

template <class S, class C>
double total_mass_impl(const S* buf, std::int64_t n) {
    double total = 0.0;
    C f[kQ];
    for (std::int64_t s = 0; s < n; ++s) {
        for (int i = 0; i < kQ; ++i) f[i] = C(buf[i * n + s]);
        total += double(detail::moments19(f).rho);
    }
    return total;
}

template <class S, class C>
void velocity_impl(const S* buf, std::int64_t n, VelocityField& out) {
    C f[kQ];
    for (std::int64_t s = 0; s < n; ++s) {
        for (int i = 0; i < kQ; ++i) f[i] = C(buf[i * n + s]);
        const auto m = detail::moments19(f);
        out.data[s] = double(m.ux);
        out.data[n + s] = double(m.uy);
        out.data[2 * n + s] = double(m.uz);
    }
}

template <class S, class C>
void density_impl(const S* buf, std::int64_t n, ScalarField& out) {
    C f[kQ];
    for (std::int64_t s = 0; s < n; ++s) {
        for (int i = 0; i < kQ; ++i) f[i] = C(buf[i * n + s]);
        out.data[s] = double(detail::moments19(f).rho);
    }
}

} // namespace

double LatticeGrid::total_mass() const {
    const std::int64_t n = sites();
    switch (mode_) {
    case Precision::Double:
        return total_mass_impl<double, double>(f64_[active_].data(), n);
    case Precision::Single:
        return total_mass_impl<float, float>(f32_[active_].data(), n);
    case Precision::Mixed:
        return total_mass_impl<float, double>(f32_[active_].data(), n);
    }
    return 0.0;
}

VelocityField LatticeGrid::velocity() const {
    VelocityField out(dims_);
    const std::int64_t n = sites();
    switch (mode_) {
    case Precision::Double:
        velocity_impl<double, double>(f64_[active_].data(), n, out);
        break;
    case Precision::Single:
        velocity_impl<float, float>(f32_[active_].data(), n, out);
        break;
    case Precision::Mixed:
        velocity_impl<float, double>(f32_[active_].data(), n, out);
        break;
    }
    return out;
}

ScalarField LatticeGrid::density() const {
    ScalarField out(dims_);
    const std::int64_t n = sites();
    switch (mode_) {
    case Precision::Double:
        density_impl<double, double>(f64_[active_].data(), n, out);
        break;
    case Precision::Single:
        density_impl<float, float>(f32_[active_].data(), n, out);
        break;
    case Precision::Mixed:
        density_impl<float, double>(f32_[active_].data(), n, out);
        break;
    }
    return out;
}

std::array<double, kQ> LatticeGrid::site(int x, int y, int z,
                                         bool inactive) const {
    const std::int64_t n = sites();
    const std::int64_t s = (std::int64_t(z) * dims_.ny + y) * dims_.nx + x;
    const int which = inactive ? active_ ^ 1 : active_;
    std::array<double, kQ> out;
    if (mode_ == Precision::Double) {
        for (int i = 0; i < kQ; ++i) out[i] = f64_[which][i * n + s];
    } else {
        for (int i = 0; i < kQ; ++i) out[i] = f32_[which][i * n + s];
    }
    return out;
}

void LatticeGrid::set_site(int x, int y, int z,
                           const std::array<double, kQ>& f) {
    const std::int64_t n = sites();
    const std::int64_t s = (std::int64_t(z) * dims_.ny + y) * dims_.nx + x;
    if (mode_ == Precision::Double) {
        for (int i = 0; i < kQ; ++i) f64_[active_][i * n + s] = f[i];
    } else {
        for (int i = 0; i < kQ; ++i)
            f32_[active_][i * n + s] = float(f[i]);
    }
}

bool LatticeGrid::bitwise_equal(const LatticeGrid& a, const LatticeGrid& b) {
    if (!(a.dims_ == b.dims_) || a.mode_ != b.mode_) return false;
    if (a.mode_ == Precision::Double) {
        const auto& x = a.f64_[a.active_];
        const auto& y = b.f64_[b.active_];
        return std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
    }
    const auto& x = a.f32_[a.active_];
    const auto& y = b.f32_[b.active_];
    return std::memcmp(x.data(), y.data(), x.size() * sizeof(float)) == 0;
}

} // namespace lbm
