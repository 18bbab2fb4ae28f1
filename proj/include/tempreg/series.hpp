// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tempreg/registration.hpp"

namespace tempreg {

// Registration strategy over a time series. `sequential` warm-starts each
// frame from the previous estimate (the temporal model); `pairwise` registers
// every frame from identity with lambda2 = 0; `concat` chains consecutive
// frame-to-frame registrations. `smoothing` (a backward pass over the whole
// series) is reserved and not implemented.
enum class FilterMode { sequential, pairwise, concat, smoothing };

std::string to_string(FilterMode mode);
FilterMode parse_filter_mode(const std::string& name);

struct SeriesInput {
    Volume3 template_vol;          // reference template I (first frame by convention)
    std::vector<Volume3> frames;   // J_1 .. J_N
    std::optional<LabelMap> labels;
};

struct FrameResult {
    VelocityField velocity;       // estimated step velocity
    VelocityField init_velocity;  // warm start used (empty when identity init)
    DisplacementField forward;    // template -> frame map (composed in concat mode)
    DisplacementField inverse;    // pull-back used to warp template/labels to the frame
    double data_term = 0.0;
    double temporal_term = 0.0;
    double min_jacobian = 0.0;
    int iterations = 0;
    double seconds = 0.0;
    bool converged = false;
};

struct SeriesResult {
    FilterMode mode = FilterMode::sequential;
    std::vector<FrameResult> frames;
};

// Lazily loaded frame access. `load` must be thread-safe when used with
// pairwise mode and more than one worker.
struct FrameProvider {
    std::size_t count = 0;
    std::function<Volume3(std::size_t)> load;
};

using FrameSink = std::function<void(std::size_t, FrameResult&&)>;

// Runs the chosen strategy over the series, emitting results strictly in
// frame order. Sequential and concat modes keep only the template, the
// current frame, and the current fields resident. workers > 1 fans out
// pairwise mode; results do not depend on the scheduling.
void filter_series_stream(const Volume3& tmpl, const FrameProvider& frames,
                          const RegConfig& cfg, FilterMode mode, const FrameSink& sink,
                          int workers = 0);

SeriesResult filter_series(const SeriesInput& input, const RegConfig& cfg, FilterMode mode,
                           int workers = 0);

// Warps the template-grid labels into each requested frame with
// nearest-neighbour sampling along the frame's pull-back field.
std::vector<LabelMap> propagate_labels(const SeriesResult& result, const LabelMap& labels,
                                       const std::vector<std::size_t>& frame_indices);

}  // namespace tempreg
