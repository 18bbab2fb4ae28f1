// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "tempreg/series.hpp"
#include "tempreg/volume.hpp"

namespace tempreg {

// Dice overlap for one label: 2|A n B| / (|A| + |B|). Both masks empty is
// defined as 1.0, exactly one empty as 0.0.
double dice(const LabelMap& a, const LabelMap& b, std::uint16_t label);

struct EpeStats {
    double mean = 0.0;
    double max = 0.0;
    double p95 = 0.0;
};

// Statistics of |est(x) - gt(x)| in voxels. With a mask, only voxels whose
// mask value matches `label` count (label 0 means any non-background voxel);
// without one, the one-voxel boundary shell is excluded.
EpeStats endpoint_error(const DisplacementField& est, const DisplacementField& gt,
                        const LabelMap* mask = nullptr, std::uint16_t label = 0);

struct ReportRow {
    std::string case_id;
    int frame = 0;  // 1-based
    std::uint16_t roi = 0;
    std::string roi_name;
    std::string mode;
    double dice = 0.0;
    double epe_mean = 0.0;
    double epe_p95 = 0.0;
    double min_jacobian = 0.0;
};

struct ModeAggregate {
    double mean_dice = 0.0;
    double min_dice = 1.0;
};

struct OverlapReport {
    std::vector<ReportRow> rows;
    std::map<std::string, ModeAggregate> aggregates;
    // Mean sequential-mode Dice; cases are conventionally listed in
    // ascending order of this key.
    double ordering_key = 0.0;
};

struct GroundTruthFields {
    std::vector<DisplacementField> forward;  // template -> frame
    std::vector<DisplacementField> inverse;  // pull-back, yields per-frame labels
};

// Per-frame, per-ROI Dice and endpoint error for each estimated mode plus
// the "none" (no alignment) condition. Ground-truth labels per frame come
// from nearest-neighbour propagation along the gt pull-back fields.
OverlapReport build_report(const std::string& case_id,
                           const std::map<std::string, const SeriesResult*>& results_by_mode,
                           const LabelMap& labels, const GroundTruthFields& gt);

std::string report_csv_header();
void append_report_csv(std::string& out, const OverlapReport& report);

}  // namespace tempreg
