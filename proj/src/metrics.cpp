// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include "tempreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace tempreg {

double dice(const LabelMap& a, const LabelMap& b, std::uint16_t label) {
    if (!(a.dims == b.dims)) {
        throw std::invalid_argument("dice: label map dims do not match");
    }
    std::size_t na = 0, nb = 0, inter = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const bool ia = a.data[i] == label;
        const bool ib = b.data[i] == label;
        na += ia;
        nb += ib;
        inter += ia && ib;
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

EpeStats endpoint_error(const DisplacementField& est, const DisplacementField& gt,
                        const LabelMap* mask, std::uint16_t label) {
    if (!(est.dims == gt.dims)) {
        throw std::invalid_argument("endpoint_error: field dims do not match");
    }
    if (mask && !(mask->dims == est.dims)) {
        throw std::invalid_argument("endpoint_error: mask dims do not match");
    }
    const Dims3 dims = est.dims;
    std::vector<double> mags;
    mags.reserve(dims.voxel_count());
    std::size_t i = 0;
    for (int z = 0; z < dims.nz; ++z) {
        for (int y = 0; y < dims.ny; ++y) {
            for (int x = 0; x < dims.nx; ++x, ++i) {
                if (mask) {
                    const std::uint16_t m = mask->data[i];
                    if (label == 0 ? m == 0 : m != label) continue;
                } else {
                    if (x == 0 || y == 0 || z == 0 || x == dims.nx - 1 || y == dims.ny - 1 ||
                        z == dims.nz - 1) {
                        continue;
                    }
                }
                const double dx = static_cast<double>(est.data[3 * i]) - gt.data[3 * i];
                const double dy =
                    static_cast<double>(est.data[3 * i + 1]) - gt.data[3 * i + 1];
                const double dz =
                    static_cast<double>(est.data[3 * i + 2]) - gt.data[3 * i + 2];
                mags.push_back(std::sqrt(dx * dx + dy * dy + dz * dz));
            }
        }
    }
    EpeStats stats;
    if (mags.empty()) return stats;
    double acc = 0.0;
    for (const double m : mags) acc += m;
    stats.mean = acc / static_cast<double>(mags.size());
    std::sort(mags.begin(), mags.end());
    stats.max = mags.back();
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(mags.size())));
    stats.p95 = mags[std::min(mags.size() - 1, rank == 0 ? 0 : rank - 1)];
    return stats;
}

OverlapReport build_report(const std::string& case_id,
                           const std::map<std::string, const SeriesResult*>& results_by_mode,
                           const LabelMap& labels, const GroundTruthFields& gt) {
    if (results_by_mode.empty()) {
        throw std::invalid_argument("build_report: no mode results given");
    }
    const std::size_t n_frames = gt.forward.size();
    if (gt.inverse.size() != n_frames) {
        throw std::invalid_argument("build_report: gt field lists differ in length");
    }
    for (const auto& [mode, res] : results_by_mode) {
        if (!res || res->frames.size() != n_frames) {
            throw std::invalid_argument("build_report: mode '" + mode +
                                        "' is missing frames");
        }
    }

    std::set<std::uint16_t> roi_ids;
    for (const auto& [id, name] : labels.label_names) {
        if (id != 0) roi_ids.insert(id);
    }
    if (roi_ids.empty()) {
        for (const std::uint16_t v : labels.data) {
            if (v != 0) roi_ids.insert(v);
        }
    }

    const DisplacementField zero_field(labels.dims, labels.spacing);
    OverlapReport report;
    std::map<std::string, std::pair<double, std::size_t>> mean_acc;

    for (std::size_t f = 0; f < n_frames; ++f) {
        const LabelMap gt_labels = warp_labels_nn(labels, gt.inverse[f]);
        std::map<std::string, LabelMap> propagated;
        for (const auto& [mode, res] : results_by_mode) {
            propagated.emplace(mode, warp_labels_nn(labels, res->frames[f].inverse));
        }

        auto emit = [&](const std::string& mode, const LabelMap& prop, std::uint16_t roi,
                        const DisplacementField& est_fwd, double min_jac) {
            ReportRow row;
            row.case_id = case_id;
            row.frame = static_cast<int>(f) + 1;
            row.roi = roi;
            const auto it = labels.label_names.find(roi);
            row.roi_name = it != labels.label_names.end() ? it->second : std::to_string(roi);
            row.mode = mode;
            row.dice = dice(prop, gt_labels, roi);
            const EpeStats epe = endpoint_error(est_fwd, gt.forward[f], &gt_labels, roi);
            row.epe_mean = epe.mean;
            row.epe_p95 = epe.p95;
            row.min_jacobian = min_jac;
            auto& agg = report.aggregates[mode];
            agg.min_dice = std::min(agg.min_dice, row.dice);
            auto& acc = mean_acc[mode];
            acc.first += row.dice;
            acc.second += 1;
            report.rows.push_back(std::move(row));
        };

        for (const std::uint16_t roi : roi_ids) {
            emit("none", labels, roi, zero_field, 1.0);
            for (const auto& [mode, res] : results_by_mode) {
                const FrameResult& fr = res->frames[f];
                emit(mode, propagated.at(mode), roi, fr.forward, fr.min_jacobian);
            }
        }
    }
    for (auto& [mode, agg] : report.aggregates) {
        const auto& acc = mean_acc[mode];
        agg.mean_dice = acc.second ? acc.first / static_cast<double>(acc.second) : 0.0;
    }
    const auto seq = report.aggregates.find("sequential");
    report.ordering_key =
        seq != report.aggregates.end() ? seq->second.mean_dice
                                       : report.aggregates.begin()->second.mean_dice;
    return report;
}

std::string report_csv_header() {
    return "case,frame,roi,mode,dice,epe_mean,epe_p95,min_jacobian\n";
}

void append_report_csv(std::string& out, const OverlapReport& report) {
    std::ostringstream os;
    for (const ReportRow& row : report.rows) {
        os << row.case_id << ',' << row.frame << ',' << row.roi_name << ',' << row.mode << ','
           << row.dice << ',' << row.epe_mean << ',' << row.epe_p95 << ','
           << row.min_jacobian << '\n';
    }
    out += os.str();
}

}  // namespace tempreg
