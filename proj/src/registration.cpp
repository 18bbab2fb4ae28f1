// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include "tempreg/registration.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace tempreg {

namespace {

constexpr int kMinLevelDim = 8;
constexpr double kMinStepScale = 1.0 / 512.0;

struct EvalState {
    DisplacementField pullback;  // exp(-v)
    Volume3 warped;
    std::vector<float> dtotal_dw;  // d(cc total)/d(warped voxel)
    double data_term = 0.0;
    double temporal_term = 0.0;
    double total() const { return data_term + temporal_term; }
};

// Full objective evaluation at one grid. want_force controls whether the
// cc derivative map is produced.
EvalState evaluate(const Volume3& tmpl, const Volume3& frame, const VelocityField& v,
                   const VelocityField* v_prev, const RegConfig& cfg, bool want_force) {
    EvalState st;
    st.pullback = exp_velocity(negated(v));
    st.warped = warp_volume(tmpl, st.pullback);
    const double cc = detail::cc_total(frame, st.warped, cfg.cc, nullptr,
                                       want_force ? &st.dtotal_dw : nullptr);
    st.data_term = -cc;
    st.temporal_term = 0.0;
    if (v_prev && cfg.lambda2 > 0.0) {
        const DisplacementField delta = compose(exp_velocity(v), exp_velocity(negated(*v_prev)));
        st.temporal_term = cfg.lambda2 * field_sq_norm(delta);
    }
    if (!std::isfinite(st.total())) {
        throw DataError("register_pair: non-finite objective; consider a smaller step_size");
    }
    return st;
}

struct LevelOutcome {
    bool converged = false;
    int evaluations = 0;
};

// Greedy descent at a single pyramid level. v is updated in place; accepted
// objective values are appended to the trace.
LevelOutcome optimize_level(const Volume3& tmpl, const Volume3& frame, VelocityField& v,
                            const VelocityField* v_prev, const RegConfig& cfg, int budget,
                            int level, int& iteration, std::vector<TraceEntry>& trace,
                            EvalState& current) {
    LevelOutcome out;
    const double sigma_fluid = cfg.lambda1 * cfg.sigma_fluid;
    const double sigma_elastic = cfg.lambda1 * cfg.sigma_elastic;
    const std::size_t n = tmpl.dims.voxel_count();
    const double inv_n = 1.0 / static_cast<double>(n);

    trace.push_back({iteration, current.data_term, current.temporal_term, level});

    double step_scale = 1.0;
    double level_gain = 0.0;  // accumulated objective improvement at this level
    for (int it = 0; it < budget; ++it) {
        // Ascent force on the cc total with respect to the pull-back field.
        VelocityField gradient(v.dims, v.spacing);
        detail::scale_by_image_gradient(current.warped, current.dtotal_dw, gradient.data);

        if (cfg.symmetric_forces) {
            // Average with the force of the reversed roles (frame warped
            // toward the template by exp(+v)).
            const DisplacementField fwd = exp_velocity(v);
            const Volume3 warped_frame = warp_volume(frame, fwd);
            std::vector<float> dw_rev;
            detail::cc_total(tmpl, warped_frame, cfg.cc, nullptr, &dw_rev);
            std::vector<float> rev_force;
            detail::scale_by_image_gradient(warped_frame, dw_rev, rev_force);
            for (std::size_t i = 0; i < gradient.data.size(); ++i) {
                gradient.data[i] = 0.5f * (gradient.data[i] - rev_force[i]);
            }
        }

        if (v_prev && cfg.lambda2 > 0.0) {
            // First-order gradient of the composition penalty: pulls v
            // toward v_prev. Subtracted because `gradient` is the direction
            // v moves away from (descent applies v -= update).
            const double w = 2.0 * cfg.lambda2 * inv_n;
            for (std::size_t i = 0; i < gradient.data.size(); ++i) {
                gradient.data[i] += static_cast<float>(w * (v.data[i] - v_prev->data[i]));
            }
        }

        VelocityField update = smooth_field(gradient, sigma_fluid);
        const double mag = max_magnitude(update);
        if (mag == 0.0) {
            out.converged = true;
            break;
        }
        const double cap = cfg.step_size * step_scale;
        const double scale = cap / mag;
        VelocityField candidate(v.dims, v.spacing);
        for (std::size_t i = 0; i < v.data.size(); ++i) {
            candidate.data[i] = v.data[i] - static_cast<float>(scale * update.data[i]);
        }
        candidate = smooth_field(candidate, sigma_elastic);

        EvalState cand_state = evaluate(tmpl, frame, candidate, v_prev, cfg, true);
        ++iteration;
        ++out.evaluations;
        const double before = current.total();
        const double after = cand_state.total();
        if (after <= before) {
            v = std::move(candidate);
            current = std::move(cand_state);
            trace.push_back({iteration, current.data_term, current.temporal_term, level});
            // Converged once a step gains only a converge_tol fraction of the
            // improvement accumulated at this level (or nothing at all).
            const double gain = before - after;
            if (gain <= 1e-12 || gain < cfg.converge_tol * level_gain) {
                out.converged = true;
                break;
            }
            level_gain += gain;
            step_scale = std::min(1.0, step_scale * 2.0);
        } else {
            // Worsening candidate: back off. The step floor doubles as the
            // stationarity test, so a warm start at the optimum stops after
            // a handful of shrinking rejections.
            step_scale *= 0.25;
            if (step_scale < kMinStepScale) {
                out.converged = true;
                break;
            }
        }
    }
    return out;
}

}  // namespace

void RegConfig::validate() const {
    if (lambda1 < 0.0 || lambda2 < 0.0) {
        throw std::invalid_argument("RegConfig: lambda1 and lambda2 must be >= 0");
    }
    if (sigma_fluid < 0.0 || sigma_elastic < 0.0) {
        throw std::invalid_argument("RegConfig: smoothing sigmas must be >= 0");
    }
    if (step_size <= 0.0) {
        throw std::invalid_argument("RegConfig: step_size must be > 0");
    }
    if (pyramid_levels < 1) {
        throw std::invalid_argument("RegConfig: pyramid_levels must be >= 1");
    }
    if (static_cast<int>(iters_per_level.size()) != pyramid_levels) {
        throw std::invalid_argument(
            "RegConfig: iters_per_level length must equal pyramid_levels");
    }
    for (const int it : iters_per_level) {
        if (it < 1) throw std::invalid_argument("RegConfig: iteration counts must be >= 1");
    }
    if (converge_tol <= 0.0) {
        throw std::invalid_argument("RegConfig: converge_tol must be > 0");
    }
    cc.validate();
}

ObjectiveValue objective(const Volume3& tmpl, const Volume3& frame, const VelocityField& v,
                         const VelocityField* v_prev, const RegConfig& cfg) {
    cfg.validate();
    if (!(tmpl.dims == frame.dims) || !(tmpl.dims == v.dims)) {
        throw std::invalid_argument("objective: grids do not match");
    }
    if (v_prev && !(v_prev->dims == tmpl.dims)) {
        throw std::invalid_argument("objective: v_prev grid does not match");
    }
    const EvalState st = evaluate(tmpl, frame, v, v_prev, cfg, false);
    return {st.total(), st.data_term, st.temporal_term};
}

RegResult register_pair(const Volume3& tmpl, const Volume3& frame, const VelocityField* init,
                        const VelocityField* v_prev, const RegConfig& cfg) {
    cfg.validate();
    if (!(tmpl.dims == frame.dims)) {
        throw std::invalid_argument("register_pair: template and frame dims do not match");
    }
    if (init && !(init->dims == tmpl.dims)) {
        throw std::invalid_argument("register_pair: init grid does not match");
    }
    if (v_prev && !(v_prev->dims == tmpl.dims)) {
        throw std::invalid_argument("register_pair: v_prev grid does not match");
    }

    // Image pyramids, coarse first. Levels that would drop below the minimum
    // extent are clamped away; the fine-end iteration budgets are kept.
    std::vector<Volume3> tmpl_pyr{tmpl};
    std::vector<Volume3> frame_pyr{frame};
    while (static_cast<int>(tmpl_pyr.size()) < cfg.pyramid_levels &&
           tmpl_pyr.back().dims.min_dim() >= 2 * kMinLevelDim) {
        tmpl_pyr.push_back(downsample_by_two(tmpl_pyr.back()));
        frame_pyr.push_back(downsample_by_two(frame_pyr.back()));
    }
    std::reverse(tmpl_pyr.begin(), tmpl_pyr.end());
    std::reverse(frame_pyr.begin(), frame_pyr.end());
    const int levels = static_cast<int>(tmpl_pyr.size());

    RegResult result;
    const VelocityField zero_full(tmpl.dims, tmpl.spacing);
    const VelocityField& init_full = init ? *init : zero_full;
    EvalState init_state = evaluate(tmpl, frame, init_full, v_prev, cfg, false);

    VelocityField v = resample_field(init_full, tmpl_pyr[0].dims, tmpl_pyr[0].spacing);
    int iteration = 0;
    bool converged = false;
    EvalState final_state;
    for (int level = 0; level < levels; ++level) {
        const Volume3& t = tmpl_pyr[level];
        const Volume3& f = frame_pyr[level];
        std::optional<VelocityField> prev_l;
        if (v_prev && cfg.lambda2 > 0.0) {
            prev_l = resample_field(*v_prev, t.dims, t.spacing);
        }
        const int budget = cfg.iters_per_level[cfg.pyramid_levels - levels + level];
        EvalState st = evaluate(t, f, v, prev_l ? &*prev_l : nullptr, cfg, true);
        const LevelOutcome out = optimize_level(t, f, v, prev_l ? &*prev_l : nullptr, cfg,
                                                budget, level, iteration, result.objective_trace,
                                                st);
        result.iterations += out.evaluations;
        converged = out.converged;
        if (level + 1 < levels) {
            v = resample_field(v, tmpl_pyr[level + 1].dims, tmpl_pyr[level + 1].spacing);
        } else {
            final_state = std::move(st);  // finest level is the full-res grid
        }
    }

    if (final_state.total() > init_state.total()) {
        // Never return a worse field than the caller handed in.
        v = init_full;
        final_state = std::move(init_state);
        converged = false;
    }

    result.velocity = std::move(v);
    result.forward = exp_velocity(result.velocity);
    result.inverse = exp_velocity(negated(result.velocity));
    result.converged = converged;
    result.final_data_term = final_state.data_term;
    result.final_temporal_term = final_state.temporal_term;
    result.min_jacobian = min_jacobian_determinant(result.forward);
    return result;
}

}  // namespace tempreg
