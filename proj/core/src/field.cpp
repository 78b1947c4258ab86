#include "lbm/field.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace lbm {

double l2_norm(const VelocityField& v) {
    double s = 0.0;
    for (double x : v.data) s += x * x;
    return std::sqrt(s);
}

double relative_l2_difference(const VelocityField& a, const VelocityField& b) {
    if (!(a.dims == b.dims)) {
        throw std::invalid_argument("field shape mismatch");
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        num += d * d;
        den += b.data[i] * b.data[i];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::sqrt(num);
    return std::sqrt(num) / std::sqrt(den);
}

VelocityField mirror_z(const VelocityField& v) {
    VelocityField out(v.dims);
    for (int z = 0; z < v.dims.nz; ++z) {
        const int zr = v.dims.nz - 1 - z;
        for (int y = 0; y < v.dims.ny; ++y) {
            for (int x = 0; x < v.dims.nx; ++x) {
                out.comp(0, x, y, z) = v.comp(0, x, y, zr);
                out.comp(1, x, y, z) = v.comp(1, x, y, zr);
                out.comp(2, x, y, z) = -v.comp(2, x, y, zr);
            }
        }
    }
    return out;
}

double mirror_z_asymmetry(const VelocityField& v) {
    return relative_l2_difference(mirror_z(v), v);
}

namespace {

void put_u64_le(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64_le(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}

} // namespace

void write_snapshot(const VelocityField& v, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::ios_base::failure("cannot open " + path.string() +
                                     " for writing");
    }
    put_u64_le(out, std::uint64_t(v.dims.nx));
    put_u64_le(out, std::uint64_t(v.dims.ny));
    put_u64_le(out, std::uint64_t(v.dims.nz));
    // x86-64 doubles are little-endian IEEE-754 already.
    out.write(reinterpret_cast<const char*>(v.data.data()),
              std::streamsize(v.data.size() * sizeof(double)));
    if (!out) {
        throw std::ios_base::failure("short write to " + path.string());
    }
}

VelocityField read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::ios_base::failure("cannot open " + path.string());
    }
    Dims d;
    d.nx = int(get_u64_le(in));
    d.ny = int(get_u64_le(in));
    d.nz = int(get_u64_le(in));
    if (!in || d.nx <= 0 || d.ny <= 0 || d.nz <= 0) {
        throw std::ios_base::failure("corrupt snapshot header in " +
                                     path.string());
    }
    VelocityField v(d);
    in.read(reinterpret_cast<char*>(v.data.data()),
            std::streamsize(v.data.size() * sizeof(double)));
    if (!in) {
        throw std::ios_base::failure("truncated snapshot " + path.string());
    }
    return v;
}

void write_centerline_csv(const VelocityField& v, std::ostream& out) {
    out << "axis,coord,ux,uy,uz\n";
    char buf[160];
    const int cx = v.dims.nx / 2, cy = v.dims.ny / 2, cz = v.dims.nz / 2;
    auto row = [&](char axis, int coord, double ux, double uy, double uz) {
        std::snprintf(buf, sizeof buf, "%c,%d,%.17g,%.17g,%.17g\n", axis,
                      coord, ux, uy, uz);
        out << buf;
    };
    for (int x = 0; x < v.dims.nx; ++x)
        row('x', x, v.comp(0, x, cy, cz), v.comp(1, x, cy, cz),
            v.comp(2, x, cy, cz));
    for (int y = 0; y < v.dims.ny; ++y)
        row('y', y, v.comp(0, cx, y, cz), v.comp(1, cx, y, cz),
            v.comp(2, cx, y, cz));
    for (int z = 0; z < v.dims.nz; ++z)
        row('z', z, v.comp(0, cx, cy, z), v.comp(1, cx, cy, z),
            v.comp(2, cx, cy, z));
}

} // namespace lbm
