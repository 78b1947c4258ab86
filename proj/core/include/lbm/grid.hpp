#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lbm/d3q19.hpp"
#include "lbm/field.hpp"

namespace lbm {

/// Arithmetic mode: (storage, compute) = (64,64), (32,32) or (32,64) bits.
enum class Precision { Double, Single, Mixed };

/// Time-stepping scheme: two separate passes (stream, then collide) versus
/// one fused gather-collide sweep. Both advance the same map; in double mode
/// they produce bitwise identical populations.
enum class Scheme { Baseline, Fused };

const char* to_string(Precision);
const char* to_string(Scheme);
Precision precision_from_string(const std::string&);
Scheme scheme_from_string(const std::string&);

/// Boundary specification. Cavity = five static no-slip walls plus a lid at
/// the y = ny-1 face moving along +x with speed u_lid (full-way bounce-back,
/// Ladd momentum correction with wall density 1).
struct Boundary {
    enum class Kind { Periodic, Cavity };
    Kind kind = Kind::Periodic;
    double u_lid = 0.0;

    static Boundary periodic() { return {Kind::Periodic, 0.0}; }
    static Boundary cavity(double u_lid) { return {Kind::Cavity, u_lid}; }
};

/// Double-buffered population field, structure-of-arrays: 19 contiguous
/// planes per buffer, x fastest. Exactly one buffer is active (holds the
/// current state); steps write the other buffer and swap.
class LatticeGrid {
  public:
    LatticeGrid(Dims dims, Precision mode);

    const Dims& dims() const { return dims_; }
    Precision precision() const { return mode_; }
    std::int64_t sites() const { return dims_.sites(); }
    bool storage_is_double() const { return mode_ == Precision::Double; }
    int active_index() const { return active_; }
    void swap_buffers() { active_ ^= 1; }

    double* active_f64() { return f64_[active_].data(); }
    const double* active_f64() const { return f64_[active_].data(); }
    double* inactive_f64() { return f64_[active_ ^ 1].data(); }
    float* active_f32() { return f32_[active_].data(); }
    const float* active_f32() const { return f32_[active_].data(); }
    float* inactive_f32() { return f32_[active_ ^ 1].data(); }

    /// Equilibrium(rho0, u0) at every site of the active buffer; the
    /// inactive buffer is zeroed.
    void fill_equilibrium(double rho0, const std::array<double, 3>& u0);

    /// Per-site initialization from a field functor
    /// f(x, y, z) -> {rho, {ux, uy, uz}}.
    template <class F>
    void fill_from(F&& field);

    /// Sum of all populations, accumulated site by site in linear site order
    /// (each site's mass uses the fixed kernel grouping).
    double total_mass() const;

    /// Velocity moments of the active buffer as a double-precision field.
    VelocityField velocity() const;

    /// Density moments of the active buffer.
    ScalarField density() const;

    /// One site's populations, widened to double (active buffer by default).
    std::array<double, kQ> site(int x, int y, int z,
                                bool inactive = false) const;
    void set_site(int x, int y, int z, const std::array<double, kQ>& f);

    /// Bitwise comparison of the active buffers of two grids.
    static bool bitwise_equal(const LatticeGrid& a, const LatticeGrid& b);

  private:
    template <class S, class C>
    void fill_equilibrium_impl(S* buf, double rho0,
                               const std::array<double, 3>& u0);

    Dims dims_;
    Precision mode_;
    int active_ = 0;
    std::array<std::vector<double>, 2> f64_;
    std::array<std::vector<float>, 2> f32_;
};

template <class F>
void LatticeGrid::fill_from(F&& field) {
    const std::int64_t n = sites();
    auto fill = [&](auto* buf, auto compute_tag) {
        using C = decltype(compute_tag);
        for (int z = 0; z < dims_.nz; ++z) {
            for (int y = 0; y < dims_.ny; ++y) {
                for (int x = 0; x < dims_.nx; ++x) {
                    const auto [rho, u] = field(x, y, z);
                    C feq[kQ];
                    detail::equilibrium19(C(rho), C(u[0]), C(u[1]), C(u[2]),
                                          feq);
                    const std::int64_t s =
                        (std::int64_t(z) * dims_.ny + y) * dims_.nx + x;
                    for (int i = 0; i < kQ; ++i) {
                        buf[i * n + s] =
                            static_cast<std::remove_reference_t<decltype(buf[0])>>(
                                feq[i]);
                    }
                }
            }
        }
    };
    switch (mode_) {
    case Precision::Double: fill(f64_[active_].data(), double{}); break;
    case Precision::Single: fill(f32_[active_].data(), float{}); break;
    case Precision::Mixed: fill(f32_[active_].data(), double{}); break;
    }
    auto& other64 = f64_[active_ ^ 1];
    auto& other32 = f32_[active_ ^ 1];
    std::fill(other64.begin(), other64.end(), 0.0);
    std::fill(other32.begin(), other32.end(), 0.0f);
}

} // namespace lbm
