// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tempreg/types.hpp"

namespace tempreg {

template <class Tag>
struct Field3;
struct DisplacementTag;
using DisplacementField = Field3<DisplacementTag>;

// Dense 3D scalar intensity grid. Data is row-major with x fastest.
// Samples outside [0, dim-1] on any axis evaluate to `background`.
struct Volume3 {
    Dims3 dims;
    Spacing3 spacing;
    float background = 0.0f;
    std::vector<float> data;

    Volume3() = default;
    Volume3(Dims3 d, Spacing3 s, float fill = 0.0f, float bg = 0.0f)
        : dims(d), spacing(s), background(bg), data(d.voxel_count(), fill) {}

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims.nx) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(dims.ny) * static_cast<std::size_t>(z));
    }
    float at(int x, int y, int z) const { return data[index(x, y, z)]; }
    float& at(int x, int y, int z) { return data[index(x, y, z)]; }
};

// Integer ROI labels over the same grid convention. Label 0 is background.
struct LabelMap {
    Dims3 dims;
    Spacing3 spacing;
    std::vector<std::uint16_t> data;
    std::map<std::uint16_t, std::string> label_names;

    LabelMap() = default;
    LabelMap(Dims3 d, Spacing3 s) : dims(d), spacing(s), data(d.voxel_count(), 0) {}

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims.nx) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(dims.ny) * static_cast<std::size_t>(z));
    }
    std::uint16_t at(int x, int y, int z) const { return data[index(x, y, z)]; }
    std::uint16_t& at(int x, int y, int z) { return data[index(x, y, z)]; }
};

// Trilinear interpolation at a continuous voxel coordinate. Throws DataError
// on non-finite p (corrupt deformation); out-of-domain returns background.
double trilinear_sample(const Volume3& vol, const Vec3& p);

// Pull-back warp: out(x) = moving sampled at x + field(x).
Volume3 warp_volume(const Volume3& moving, const DisplacementField& field);

// Nearest-neighbour pull-back of label ids along x + field(x); out-of-domain
// voxels become background (0).
LabelMap warp_labels_nn(const LabelMap& labels, const DisplacementField& field);

// Separable discrete Gaussian, kernel truncated at +/-ceil(3*sigma) and
// renormalized over the in-domain support. sigma == 0 returns the input
// unchanged. sigma is in voxels.
Volume3 gaussian_smooth(const Volume3& vol, double sigma);

// Trilinear resampling onto an isotropic grid covering the same physical
// extent; output dims are ceil(extent / target_spacing) per axis.
Volume3 resample_to_isotropic(const Volume3& vol, double target_spacing);

// Smooth (sigma = 1) then keep every second voxel; spacing doubles.
Volume3 downsample_by_two(const Volume3& vol);

namespace detail {
// Per-channel separable Gaussian over interleaved data; shared by scalar
// volumes and vector fields.
void gaussian_smooth_inplace(std::vector<float>& data, const Dims3& dims, int channels,
                             double sigma);
}  // namespace detail

}  // namespace tempreg
