// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "tempreg/field.hpp"
#include "tempreg/similarity.hpp"
#include "tempreg/volume.hpp"

namespace tempreg {

// Pairwise registration parameters. Spatial regularization is realized by
// Gaussian smoothing of the update (fluid) and of the accumulated velocity
// (elastic); lambda1 scales both sigmas. lambda2 weights the penalty pulling
// the estimate toward the previous frame's deformation.
struct RegConfig {
    double lambda1 = 1.0;
    double lambda2 = 0.0;
    double sigma_fluid = 3.0;
    double sigma_elastic = 0.5;
    double step_size = 0.25;  // max update magnitude per iteration, voxels
    int pyramid_levels = 3;
    std::vector<int> iters_per_level = {50, 50, 25};  // coarse -> fine
    double converge_tol = 1e-4;
    bool symmetric_forces = false;
    CcConfig cc;

    void validate() const;
};

struct TraceEntry {
    int iteration = 0;
    double data_term = 0.0;
    double temporal_term = 0.0;
    int level = 0;  // pyramid level, 0 = coarsest
    double total() const { return data_term + temporal_term; }
};

struct RegResult {
    VelocityField velocity;
    DisplacementField forward;   // exp(velocity)
    DisplacementField inverse;   // exp(-velocity), the pull-back used to warp
    std::vector<TraceEntry> objective_trace;
    bool converged = false;
    int iterations = 0;  // candidate evaluations over all levels
    double final_data_term = 0.0;
    double final_temporal_term = 0.0;
    double min_jacobian = 0.0;
};

struct ObjectiveValue {
    double total = 0.0;
    double data_term = 0.0;
    double temporal_term = 0.0;
};

// data = -local_cc(frame, template warped by exp(-v)); temporal =
// lambda2 * ||exp(v) o exp(-v_prev)||^2 when v_prev is given.
ObjectiveValue objective(const Volume3& tmpl, const Volume3& frame, const VelocityField& v,
                         const VelocityField* v_prev, const RegConfig& cfg);

// Multi-resolution greedy descent over a stationary velocity field. `init`
// warm-starts the estimate; `v_prev` activates the temporal penalty when
// lambda2 > 0. Candidate steps that worsen the objective are rejected, so
// the accepted trace is non-increasing and the final objective never
// exceeds the objective at init.
RegResult register_pair(const Volume3& tmpl, const Volume3& frame, const VelocityField* init,
                        const VelocityField* v_prev, const RegConfig& cfg);

}  // namespace tempreg
