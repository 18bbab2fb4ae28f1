// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tempreg/field.hpp"
#include "tempreg/volume.hpp"

namespace tempreg {

// A labeled region built from one or more ellipsoids (a sphere is one
// ellipsoid, a lumpy blob is several). Geometry is given as fractions of the
// volume extent so the same spec scales across grid sizes.
struct PhantomRoi {
    struct Ellipsoid {
        Vec3 center_frac;  // fractions of (nx, ny, nz)
        Vec3 semi_frac;
    };
    std::uint16_t label = 0;
    std::string name;
    float intensity = 0.0f;
    std::vector<Ellipsoid> parts;
};

std::vector<PhantomRoi> default_phantom_rois();

// Synthetic 4D ground-truth series: a textured template with labeled ROIs
// deformed by a temporally coherent velocity chain, with optional abrupt
// jumps, voxel noise and an ROI-local intensity drift.
struct PhantomSpec {
    Dims3 dims{48, 48, 48};
    int n_frames = 20;
    std::uint64_t seed = 1;
    double drift_amplitude = 0.4;  // max increment magnitude, voxels/frame
    double drift_coherence = 0.95;  // 0 = fresh direction each frame, 1 = fixed direction
    double jump_probability = 0.0;
    double jump_amplitude = 3.0;  // voxels
    int jump_frame = -1;          // deterministic jump at this frame index, -1 = none
    double velocity_smoothness_sigma = 4.0;  // voxels
    double noise_sigma = 2.0;                // intensity units
    std::uint16_t intensity_drift_roi = 0;   // 0 = no drift
    double intensity_drift_fraction = 0.0;   // fractional change reached at the last frame
    float background_mean = 40.0f;
    float texture_amplitude = 8.0f;
    std::vector<PhantomRoi> rois = default_phantom_rois();

    void validate() const;
};

struct PhantomSeries {
    Volume3 template_vol;
    LabelMap labels;
    std::vector<Volume3> frames;
    std::vector<VelocityField> gt_velocities;
    std::vector<DisplacementField> gt_forward;  // exp(v_n)
    std::vector<DisplacementField> gt_inverse;  // exp(-v_n), pull-back
};

// Piecewise-smooth template over a low-frequency noise texture, plus the
// matching label map. Throws DataError if an ROI is empty, overlaps another,
// or does not fit inside the volume.
std::pair<Volume3, LabelMap> gen_template(const PhantomSpec& spec);

// Draws the velocity chain v_1 = 0, v_n = v_{n-1} + increment (+ jump),
// renders each frame by pull-back warping plus noise, and keeps all
// ground-truth fields. Every forward field is checked for Jacobian
// positivity; failing draws are retried up to 10 times.
PhantomSeries gen_series(const Volume3& template_vol, const LabelMap& labels,
                         const PhantomSpec& spec);

PhantomSeries gen_phantom(const PhantomSpec& spec);

}  // namespace tempreg
