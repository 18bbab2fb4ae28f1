// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "tempreg/field.hpp"
#include "tempreg/volume.hpp"

namespace tempreg {

// Local windowed normalized cross-correlation. The window is a cube of
// width 2*radius + 1, clipped at the volume boundary.
struct CcConfig {
    int radius = 2;
    double epsilon = 1e-5;  // variance floor below which a window is degenerate

    void validate() const {
        if (radius < 1) throw std::invalid_argument("CcConfig: radius must be >= 1");
        if (epsilon <= 0.0) throw std::invalid_argument("CcConfig: epsilon must be > 0");
    }
};

struct CcResult {
    double total = 0.0;  // mean of the per-voxel cc map, in [0, 1]
    Volume3 map;
};

// Squared local CC per window: <f,w>^2 / (<f,f> <w,w>) with window-mean
// subtracted operands. Degenerate windows contribute 0. The image
// dissimilarity used by registration is Dist = -total.
CcResult local_cc(const Volume3& fixed, const Volume3& warped, const CcConfig& cfg);

// d(total)/d(displacement) at each voxel: the exact derivative of the
// window-summed cc total with respect to the warped intensity, multiplied by
// the spatial gradient of the warped moving image. Ascent direction on cc.
VelocityField cc_gradient(const Volume3& fixed, const Volume3& moving,
                          const DisplacementField& current_field, const CcConfig& cfg);

namespace detail {

// Shared evaluation path: returns the cc total; optionally fills the per-voxel
// cc map and/or d(total)/d(warped voxel value).
double cc_total(const Volume3& fixed, const Volume3& warped, const CcConfig& cfg,
                Volume3* cc_map, std::vector<float>* dtotal_dwarped);

// Multiplies a per-voxel scalar by central differences of `img`, writing an
// interleaved force field.
void scale_by_image_gradient(const Volume3& img, const std::vector<float>& scalar,
                             std::vector<float>& force);

}  // namespace detail

}  // namespace tempreg
