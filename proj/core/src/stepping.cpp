#include "lbm/stepping.hpp"

#include <cmath>

namespace lbm {

namespace {

using detail::collide19;
using detail::moments19;

struct LidTable {
    // Momentum correction per outgoing direction j for the moving lid:
    // 2 w_j rho_w (c_j . u_lid) / cs^2 with rho_w = 1, u_lid along +x.
    double value[kQ];
};

template <class C>
void make_lid_table(double u_lid, C* lid) {
    for (int j = 0; j < kQ; ++j) {
        lid[j] = C(6) * C(Stencil::weight[j]) *
                 C(Stencil::velocity[j][0]) * C(u_lid);
    }
}

// One sweep over the grid: gather the 19 incoming populations per site from
// `src` (pull form; populations leaving the domain bounce back into their
// opposite slot at the same site, lid crossings get the momentum
// correction), optionally collide, and write to `dst`.
//
// Interior sites take a branch-free path over precomputed linear offsets;
// the gathered values are identical either way. Writes are disjoint per
// site, so the z loop parallelizes without changing any result bit.
template <class S, class C, bool kCollide>
void sweep(const S* src, S* dst, Dims d, C omega, const Boundary& boundary) {
    const int nx = d.nx, ny = d.ny, nz = d.nz;
    const std::int64_t n = d.sites();
    const bool periodic = boundary.kind == Boundary::Kind::Periodic;

    C lid[kQ];
    make_lid_table(boundary.u_lid, lid);

    std::int64_t off[kQ];
    for (int i = 0; i < kQ; ++i) {
        off[i] = (std::int64_t(Stencil::velocity[i][2]) * ny +
                  Stencil::velocity[i][1]) *
                     nx +
                 Stencil::velocity[i][0];
    }

#pragma omp parallel for schedule(static)
    for (int z = 0; z < nz; ++z) {
        for (int y = 0; y < ny; ++y) {
            const std::int64_t row = (std::int64_t(z) * ny + y) * nx;

            auto emit = [&](std::int64_t s, const C* g) {
                if constexpr (kCollide) {
                    const auto m = moments19(g);
                    C out[kQ];
                    collide19(g, omega, m, out);
                    for (int i = 0; i < kQ; ++i) dst[i * n + s] = S(out[i]);
                } else {
                    for (int i = 0; i < kQ; ++i) dst[i * n + s] = S(g[i]);
                }
            };

            auto edge_site = [&](int x) {
                const std::int64_t s = row + x;
                C g[kQ];
                for (int i = 0; i < kQ; ++i) {
                    int sx = x - Stencil::velocity[i][0];
                    int sy = y - Stencil::velocity[i][1];
                    int sz = z - Stencil::velocity[i][2];
                    if (periodic) {
                        sx = sx < 0 ? nx - 1 : (sx == nx ? 0 : sx);
                        sy = sy < 0 ? ny - 1 : (sy == ny ? 0 : sy);
                        sz = sz < 0 ? nz - 1 : (sz == nz ? 0 : sz);
                        const std::int64_t q =
                            (std::int64_t(sz) * ny + sy) * nx + sx;
                        g[i] = C(src[i * n + q]);
                    } else if (unsigned(sx) < unsigned(nx) &&
                               unsigned(sy) < unsigned(ny) &&
                               unsigned(sz) < unsigned(nz)) {
                        const std::int64_t q =
                            (std::int64_t(sz) * ny + sy) * nx + sx;
                        g[i] = C(src[i * n + q]);
                    } else {
                        // The population that would have arrived from outside
                        // is the one leaving this site in the opposite
                        // direction, reflected in place. If it left through
                        // the lid face (top y), it carries the wall-motion
                        // correction.
                        const int j = Stencil::opposite(i);
                        C v = C(src[j * n + s]);
                        if (sy >= ny) v -= lid[j];
                        g[i] = v;
                    }
                }
                emit(s, g);
            };

            const bool yz_interior =
                z > 0 && z < nz - 1 && y > 0 && y < ny - 1;
            if (yz_interior) {
                edge_site(0);
                // Per-direction row bases give the vectorizer 19 unit-stride
                // streams; the arithmetic per site is unchanged.
                const S* srow[kQ];
                S* drow[kQ];
                for (int i = 0; i < kQ; ++i) {
                    srow[i] = src + i * n + row - off[i];
                    drow[i] = dst + i * n + row;
                }
                for (int x = 1; x < nx - 1; ++x) {
                    C g[kQ];
#pragma GCC unroll 19
                    for (int i = 0; i < kQ; ++i) g[i] = C(srow[i][x]);
                    if constexpr (kCollide) {
                        const auto m = moments19(g);
                        C out[kQ];
                        collide19(g, omega, m, out);
#pragma GCC unroll 19
                        for (int i = 0; i < kQ; ++i) drow[i][x] = S(out[i]);
                    } else {
#pragma GCC unroll 19
                        for (int i = 0; i < kQ; ++i) drow[i][x] = S(g[i]);
                    }
                }
                edge_site(nx - 1);
            } else {
                for (int x = 0; x < nx; ++x) edge_site(x);
            }
        }
    }
}

template <class S, class C>
void collide_inplace(S* buf, Dims d, C omega) {
    const std::int64_t n = d.sites();

#pragma omp parallel for schedule(static)
    for (int z = 0; z < d.nz; ++z) {
        for (int y = 0; y < d.ny; ++y) {
            const std::int64_t row = (std::int64_t(z) * d.ny + y) * d.nx;
            for (int x = 0; x < d.nx; ++x) {
                const std::int64_t s = row + x;
                C f[kQ];
                for (int i = 0; i < kQ; ++i) f[i] = C(buf[i * n + s]);
                const auto m = moments19(f);
                C out[kQ];
                collide19(f, omega, m, out);
                for (int i = 0; i < kQ; ++i) buf[i * n + s] = S(out[i]);
            }
        }
    }
}

void require_omega(double omega) {
    if (!(omega > 0.0 && omega < 2.0)) {
        throw std::domain_error("omega must lie in (0, 2), got " +
                                std::to_string(omega));
    }
}

template <bool kCollide>
void dispatch_sweep(LatticeGrid& g, double omega, const Boundary& b) {
    const Dims d = g.dims();
    switch (g.precision()) {
    case Precision::Double:
        sweep<double, double, kCollide>(g.active_f64(), g.inactive_f64(), d,
                                        omega, b);
        break;
    case Precision::Single:
        sweep<float, float, kCollide>(g.active_f32(), g.inactive_f32(), d,
                                      float(omega), b);
        break;
    case Precision::Mixed:
        sweep<float, double, kCollide>(g.active_f32(), g.inactive_f32(), d,
                                       omega, b);
        break;
    }
}

} // namespace

void step_baseline(LatticeGrid& grid, double omega, const Boundary& boundary) {
    require_omega(omega);
    dispatch_sweep<false>(grid, omega, boundary);
    detail::collide_pass(grid, omega);
    grid.swap_buffers();
}

void step_fused(LatticeGrid& grid, double omega, const Boundary& boundary) {
    require_omega(omega);
    dispatch_sweep<true>(grid, omega, boundary);
    grid.swap_buffers();
}

void scan_for_divergence(const LatticeGrid& grid, long step) {
    const Dims d = grid.dims();
    const std::int64_t n = grid.sites();
    auto scan = [&](const auto* buf) {
        for (int i = 0; i < kQ; ++i) {
            for (std::int64_t s = 0; s < n; ++s) {
                if (!std::isfinite(double(buf[i * n + s]))) {
                    const int x = int(s % d.nx);
                    const int y = int((s / d.nx) % d.ny);
                    const int z = int(s / (std::int64_t(d.nx) * d.ny));
                    throw DivergenceError(step, x, y, z, i);
                }
            }
        }
    };
    if (grid.storage_is_double()) {
        scan(grid.active_f64());
    } else {
        scan(grid.active_f32());
    }
}

namespace detail {

void stream_pass(LatticeGrid& grid, const Boundary& boundary) {
    dispatch_sweep<false>(grid, 1.0, boundary);
}

void collide_pass(LatticeGrid& grid, double omega) {
    const Dims d = grid.dims();
    switch (grid.precision()) {
    case Precision::Double:
        collide_inplace<double, double>(grid.inactive_f64(), d, omega);
        break;
    case Precision::Single:
        collide_inplace<float, float>(grid.inactive_f32(), d, float(omega));
        break;
    case Precision::Mixed:
        collide_inplace<float, double>(grid.inactive_f32(), d, omega);
        break;
    }
}

} // namespace detail

} // namespace lbm
