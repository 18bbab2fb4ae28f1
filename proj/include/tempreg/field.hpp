// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "tempreg/types.hpp"
#include "tempreg/volume.hpp"

namespace tempreg {

// Dense 3-vector field on a voxel grid. Components are stored interleaved
// (dx, dy, dz) per voxel, x fastest, in units of voxels.
template <class Tag>
struct Field3 {
    Dims3 dims;
    Spacing3 spacing;
    std::vector<float> data;

    Field3() = default;
    Field3(Dims3 d, Spacing3 s) : dims(d), spacing(s), data(d.voxel_count() * 3, 0.0f) {}

    std::size_t index(int x, int y, int z) const {
        return 3 * (static_cast<std::size_t>(x) +
                    static_cast<std::size_t>(dims.nx) *
                        (static_cast<std::size_t>(y) +
                         static_cast<std::size_t>(dims.ny) * static_cast<std::size_t>(z)));
    }
    Vec3 at(int x, int y, int z) const {
        const std::size_t i = index(x, y, z);
        return {data[i], data[i + 1], data[i + 2]};
    }
    void set(int x, int y, int z, const Vec3& v) {
        const std::size_t i = index(x, y, z);
        data[i] = static_cast<float>(v.x);
        data[i + 1] = static_cast<float>(v.y);
        data[i + 2] = static_cast<float>(v.z);
    }
    bool empty() const { return data.empty(); }
};

struct VelocityTag {};
struct DisplacementTag {};

// Stationary velocity field generating a diffeomorphism via exp().
using VelocityField = Field3<VelocityTag>;
// Displacement d of the map x -> x + d(x).
using DisplacementField = Field3<DisplacementTag>;

// Trilinear sample with coordinates clamped to the domain, so sampling past
// the boundary reads the boundary vector instead of tearing to background.
template <class Tag>
Vec3 sample_field_clamped(const Field3<Tag>& f, const Vec3& p);

// Largest per-voxel vector magnitude.
template <class Tag>
double max_magnitude(const Field3<Tag>& f);

template <class Tag>
Field3<Tag> negated(const Field3<Tag>& f);

// Mean squared vector magnitude, in voxels^2.
template <class Tag>
double field_sq_norm(const Field3<Tag>& f);

// Component-wise Gaussian smoothing.
template <class Tag>
Field3<Tag> smooth_field(const Field3<Tag>& f, double sigma);

// Trilinear resample onto a new grid; positions map through physical
// coordinates and components are rescaled so physical displacement is kept.
template <class Tag>
Field3<Tag> resample_field(const Field3<Tag>& f, Dims3 new_dims, Spacing3 new_spacing);

// Smallest n with max|v| / 2^n < 0.5 voxel, at least 4.
int recommended_exp_steps(const VelocityField& v);

// Scaling and squaring: d = v / 2^n, then n self-compositions.
DisplacementField exp_velocity(const VelocityField& v, int n_steps);
DisplacementField exp_velocity(const VelocityField& v);

// Map composition r with (x -> x + r(x)) = (x -> x + outer(x)) o (x -> x + inner(x)),
// i.e. r(x) = inner(x) + outer(x + inner(x)).
DisplacementField compose(const DisplacementField& outer, const DisplacementField& inner);

// Fixed-point inversion d_inv <- -d(x + d_inv(x)). Throws ConvergenceError
// (carrying the residual) if the update does not drop below tol in iters.
DisplacementField invert(const DisplacementField& d, int iters = 30, double tol = 1e-2);

// Determinant of the Jacobian of x + d(x); central differences inside,
// one-sided at the boundary. Positive everywhere certifies invertibility.
Volume3 jacobian_determinant(const DisplacementField& d);

double min_jacobian_determinant(const DisplacementField& d);

}  // namespace tempreg
