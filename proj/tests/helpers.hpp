// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "tempreg/field.hpp"
#include "tempreg/types.hpp"
#include "tempreg/volume.hpp"

namespace tempreg::test {

// Multi-octave random texture: structure at several scales so downsampled
// pyramid levels still carry alignment signal, and every CC window has
// healthy variance. `sigma` scales the octave widths.
inline Volume3 textured_volume(Dims3 dims, std::uint64_t seed, float base = 50.0f,
                               float amplitude = 10.0f, double sigma = 1.5) {
    Volume3 vol(dims, {1.0, 1.0, 1.0});
    const double octave_scale[3] = {1.0, 2.5, 6.0};
    const double octave_weight[3] = {0.5, 0.3, 0.2};
    for (int o = 0; o < 3; ++o) {
        Rng rng(stream_seed(seed, "texture-octave", o));
        Volume3 layer(dims, {1.0, 1.0, 1.0});
        for (float& v : layer.data) v = static_cast<float>(rng.gaussian());
        layer = gaussian_smooth(layer, sigma * octave_scale[o]);
        double mean = 0.0, sq = 0.0;
        for (const float v : layer.data) {
            mean += v;
            sq += static_cast<double>(v) * v;
        }
        mean /= static_cast<double>(layer.data.size());
        const double sd =
            std::sqrt(std::max(sq / layer.data.size() - mean * mean, 1e-12));
        for (std::size_t i = 0; i < vol.data.size(); ++i) {
            vol.data[i] += static_cast<float>(octave_weight[o] * (layer.data[i] - mean) / sd);
        }
    }
    double mean = 0.0, sq = 0.0;
    for (const float v : vol.data) {
        mean += v;
        sq += static_cast<double>(v) * v;
    }
    mean /= static_cast<double>(vol.data.size());
    const double sd = std::sqrt(std::max(sq / vol.data.size() - mean * mean, 1e-12));
    for (float& v : vol.data) {
        v = base + amplitude * static_cast<float>((v - mean) / sd);
    }
    return vol;
}

// Rolls intensities off to zero at the volume faces, like the air margin of
// an acquired scan. The outermost plane is exactly zero, so the hard
// out-of-domain cutoff of warp sampling has nothing to tear: background fill
// equals the face content.
inline Volume3 tapered(Volume3 vol, int ramp = 4) {
    auto weight = [&](int i, int n) {
        const int d = std::min(i, n - 1 - i);
        return d >= ramp ? 1.0 : static_cast<double>(d) / ramp;
    };
    std::size_t i = 0;
    for (int z = 0; z < vol.dims.nz; ++z) {
        for (int y = 0; y < vol.dims.ny; ++y) {
            for (int x = 0; x < vol.dims.nx; ++x, ++i) {
                const double w = weight(x, vol.dims.nx) * weight(y, vol.dims.ny) *
                                 weight(z, vol.dims.nz);
                vol.data[i] = static_cast<float>(vol.data[i] * w);
            }
        }
    }
    return vol;
}

// Gaussian bump over a tapered textured background, centered at `center`.
inline Volume3 blob_volume(Dims3 dims, Vec3 center, double radius, float peak = 100.0f,
                           std::uint64_t seed = 7) {
    Volume3 vol = textured_volume(dims, seed, 20.0f, 6.0f);
    std::size_t i = 0;
    for (int z = 0; z < dims.nz; ++z) {
        for (int y = 0; y < dims.ny; ++y) {
            for (int x = 0; x < dims.nx; ++x, ++i) {
                const double dx = x - center.x, dy = y - center.y, dz = z - center.z;
                const double r2 = (dx * dx + dy * dy + dz * dz) / (radius * radius);
                vol.data[i] += peak * static_cast<float>(std::exp(-0.5 * r2));
            }
        }
    }
    return tapered(std::move(vol));
}

// Smooth random velocity field rescaled to a target max magnitude.
inline VelocityField random_smooth_velocity(Dims3 dims, double max_mag, double sigma,
                                            std::uint64_t seed) {
    Rng rng(seed);
    VelocityField f(dims, {1.0, 1.0, 1.0});
    for (float& v : f.data) v = static_cast<float>(rng.gaussian());
    detail::gaussian_smooth_inplace(f.data, dims, 3, sigma);
    const double m = max_magnitude(f);
    if (m > 0.0) {
        for (float& v : f.data) v = static_cast<float>(v * max_mag / m);
    }
    return f;
}

inline DisplacementField constant_displacement(Dims3 dims, Vec3 t) {
    DisplacementField d(dims, {1.0, 1.0, 1.0});
    for (std::size_t i = 0; i < d.data.size(); i += 3) {
        d.data[i] = static_cast<float>(t.x);
        d.data[i + 1] = static_cast<float>(t.y);
        d.data[i + 2] = static_cast<float>(t.z);
    }
    return d;
}

inline VelocityField constant_velocity(Dims3 dims, Vec3 t) {
    VelocityField v(dims, {1.0, 1.0, 1.0});
    for (std::size_t i = 0; i < v.data.size(); i += 3) {
        v.data[i] = static_cast<float>(t.x);
        v.data[i + 1] = static_cast<float>(t.y);
        v.data[i + 2] = static_cast<float>(t.z);
    }
    return v;
}

// Mean displacement magnitude over interior voxels (one-voxel shell excluded).
inline double mean_interior_magnitude(const DisplacementField& d, int margin = 1) {
    double acc = 0.0;
    std::size_t n = 0;
    for (int z = margin; z < d.dims.nz - margin; ++z) {
        for (int y = margin; y < d.dims.ny - margin; ++y) {
            for (int x = margin; x < d.dims.nx - margin; ++x) {
                acc += d.at(x, y, z).norm();
                ++n;
            }
        }
    }
    return n ? acc / static_cast<double>(n) : 0.0;
}

}  // namespace tempreg::test
