// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tempreg {

// Voxel grid extents. x is the fastest-varying axis in memory.
struct Dims3 {
    int nx = 0;
    int ny = 0;
    int nz = 0;

    bool operator==(const Dims3&) const = default;

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
               static_cast<std::size_t>(nz);
    }
    bool valid() const { return nx >= 1 && ny >= 1 && nz >= 1; }
    int min_dim() const { return nx < ny ? (nx < nz ? nx : nz) : (ny < nz ? ny : nz); }
};

// Physical voxel size in mm. Physical position of voxel (i,j,k) is
// (i*sx, j*sy, k*sz); there is no orientation matrix.
struct Spacing3 {
    double sx = 1.0;
    double sy = 1.0;
    double sz = 1.0;

    bool operator==(const Spacing3&) const = default;
    bool valid() const { return sx > 0.0 && sy > 0.0 && sz > 0.0; }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double sq_norm() const { return x * x + y * y + z * z; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

// Bad input content: malformed files, mismatched grids, corrupt fields.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solve failed to reach its tolerance within its budget.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

  private:
    double residual_ = 0.0;
};

// Deterministic random streams. A single master seed is split into named
// sub-streams so that any consumer (texture, per-frame noise, per-frame
// velocity increment) draws from its own reproducible generator regardless
// of evaluation order. Distributions are hand-rolled on top of mt19937_64
// so the byte stream does not depend on the standard library vendor.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; pairs are cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// FNV-1a over the stream name, mixed with the master seed and an index
// through splitmix64 finalizers.
inline std::uint64_t stream_seed(std::uint64_t master, std::string_view name,
                                 std::uint64_t index = 0) {
    std::uint64_t h = 1469598103934665603ull;
    for (const char c : name) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 1099511628211ull;
    }
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (h ^ (index + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline Rng make_stream(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
    return Rng(stream_seed(master, name, index));
}

}  // namespace tempreg
