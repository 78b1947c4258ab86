#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace lbm {

struct Dims {
    int nx = 0, ny = 0, nz = 0;

    std::int64_t sites() const {
        return std::int64_t(nx) * ny * nz;
    }
    bool operator==(const Dims&) const = default;
};

/// Velocity field, three component planes (ux, uy, uz), x fastest.
struct VelocityField {
    Dims dims;
    std::vector<double> data; // size 3 * dims.sites()

    VelocityField() = default;
    explicit VelocityField(Dims d) : dims(d), data(3 * d.sites(), 0.0) {}

    std::int64_t plane() const { return dims.sites(); }
    std::int64_t index(int x, int y, int z) const {
        return (std::int64_t(z) * dims.ny + y) * dims.nx + x;
    }
    double& comp(int c, int x, int y, int z) {
        return data[c * plane() + index(x, y, z)];
    }
    double comp(int c, int x, int y, int z) const {
        return data[c * plane() + index(x, y, z)];
    }
};

/// Scalar field (density, residual maps), x fastest.
struct ScalarField {
    Dims dims;
    std::vector<double> data;

    ScalarField() = default;
    explicit ScalarField(Dims d) : dims(d), data(d.sites(), 0.0) {}

    double& at(int x, int y, int z) {
        return data[(std::int64_t(z) * dims.ny + y) * dims.nx + x];
    }
    double at(int x, int y, int z) const {
        return data[(std::int64_t(z) * dims.ny + y) * dims.nx + x];
    }
};

double l2_norm(const VelocityField& v);

/// ||a - b||_2 / ||b||_2. Throws std::invalid_argument on shape mismatch.
double relative_l2_difference(const VelocityField& a, const VelocityField& b);

/// Reflection across the z mid-plane with the z component negated:
/// out(x, y, z) = (ux, uy, -uz)(x, y, nz-1-z).
VelocityField mirror_z(const VelocityField& v);

/// ||v - mirror_z(v)||_2 / ||v||_2; zero for a field symmetric under the
/// cavity's reflection.
double mirror_z_asymmetry(const VelocityField& v);

/// Flat binary snapshot: 24-byte header (nx, ny, nz as 64-bit little-endian
/// unsigned integers) followed by the three component planes as 64-bit
/// little-endian floats, x fastest.
void write_snapshot(const VelocityField& v, const std::filesystem::path& path);
VelocityField read_snapshot(const std::filesystem::path& path);

/// Axis-aligned centerline profiles as CSV
/// (axis, coord, ux, uy, uz), one block per axis.
void write_centerline_csv(const VelocityField& v, std::ostream& out);

} // namespace lbm
