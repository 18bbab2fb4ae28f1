// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include "tempreg/series.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace tempreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

FrameResult from_reg(RegResult&& reg, const VelocityField* init, double secs) {
    FrameResult fr;
    fr.velocity = std::move(reg.velocity);
    if (init) fr.init_velocity = *init;
    fr.forward = std::move(reg.forward);
    fr.inverse = std::move(reg.inverse);
    fr.data_term = reg.final_data_term;
    fr.temporal_term = reg.final_temporal_term;
    fr.min_jacobian = reg.min_jacobian;
    fr.iterations = reg.iterations;
    fr.seconds = secs;
    fr.converged = reg.converged;
    return fr;
}

[[noreturn]] void rethrow_with_frame(std::size_t frame_idx, const std::exception& e) {
    std::ostringstream msg;
    msg << "frame " << frame_idx + 1 << ": " << e.what();
    throw DataError(msg.str());
}

void check_frame_grid(const Volume3& tmpl, const Volume3& frame, std::size_t idx) {
    if (!(frame.dims == tmpl.dims)) {
        std::ostringstream msg;
        msg << "frame " << idx + 1 << ": dims do not match template";
        throw DataError(msg.str());
    }
}

void run_sequential(const Volume3& tmpl, const FrameProvider& frames, const RegConfig& cfg,
                    const FrameSink& sink) {
    VelocityField prev;  // estimate carried forward
    for (std::size_t n = 0; n < frames.count; ++n) {
        const Volume3 frame = frames.load(n);
        check_frame_grid(tmpl, frame, n);
        const auto t0 = Clock::now();
        const bool warm = n > 0 && !prev.empty();
        try {
            RegResult reg = register_pair(tmpl, frame, warm ? &prev : nullptr,
                                          warm ? &prev : nullptr, cfg);
            FrameResult fr = from_reg(std::move(reg), warm ? &prev : nullptr,
                                      seconds_since(t0));
            prev = fr.velocity;
            sink(n, std::move(fr));
        } catch (const DataError& e) {
            rethrow_with_frame(n, e);
        }
    }
}

void run_concat(const Volume3& tmpl, const FrameProvider& frames, const RegConfig& cfg,
                const FrameSink& sink) {
    RegConfig step_cfg = cfg;
    step_cfg.lambda2 = 0.0;
    Volume3 prev_frame;
    DisplacementField prev_fwd, prev_inv;
    CcConfig cc = cfg.cc;
    for (std::size_t n = 0; n < frames.count; ++n) {
        Volume3 frame = frames.load(n);
        check_frame_grid(tmpl, frame, n);
        const auto t0 = Clock::now();
        try {
            const Volume3& moving = n == 0 ? tmpl : prev_frame;
            RegResult reg = register_pair(moving, frame, nullptr, nullptr, step_cfg);
            FrameResult fr = from_reg(std::move(reg), nullptr, 0.0);
            if (n > 0) {
                fr.forward = compose(fr.forward, prev_fwd);
                fr.inverse = compose(prev_inv, fr.inverse);
                fr.min_jacobian = min_jacobian_determinant(fr.forward);
                // Report alignment against the template under the chained map.
                fr.data_term = -local_cc(frame, warp_volume(tmpl, fr.inverse), cc).total;
            }
            fr.seconds = seconds_since(t0);
            prev_fwd = fr.forward;
            prev_inv = fr.inverse;
            prev_frame = std::move(frame);
            sink(n, std::move(fr));
        } catch (const DataError& e) {
            rethrow_with_frame(n, e);
        }
    }
}

void run_pairwise(const Volume3& tmpl, const FrameProvider& frames, const RegConfig& cfg,
                  const FrameSink& sink, int workers) {
    RegConfig pw_cfg = cfg;
    pw_cfg.lambda2 = 0.0;
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
    }
    workers = std::max(1, std::min<int>(workers, static_cast<int>(frames.count)));

    if (workers == 1) {
        for (std::size_t n = 0; n < frames.count; ++n) {
            const Volume3 frame = frames.load(n);
            check_frame_grid(tmpl, frame, n);
            const auto t0 = Clock::now();
            try {
                RegResult reg = register_pair(tmpl, frame, nullptr, nullptr, pw_cfg);
                sink(n, from_reg(std::move(reg), nullptr, seconds_since(t0)));
            } catch (const DataError& e) {
                rethrow_with_frame(n, e);
            }
        }
        return;
    }

    // Fan frames out to workers; emit in frame order as results land.
    std::mutex mu;
    std::condition_variable cv;
    std::map<std::size_t, FrameResult> done;
    std::atomic<std::size_t> next_frame{0};
    std::exception_ptr failure;

    auto work = [&]() {
        for (;;) {
            const std::size_t n = next_frame.fetch_add(1);
            if (n >= frames.count) return;
            try {
                const Volume3 frame = frames.load(n);
                check_frame_grid(tmpl, frame, n);
                const auto t0 = Clock::now();
                RegResult reg = register_pair(tmpl, frame, nullptr, nullptr, pw_cfg);
                FrameResult fr = from_reg(std::move(reg), nullptr, seconds_since(t0));
                std::lock_guard<std::mutex> lock(mu);
                done.emplace(n, std::move(fr));
                cv.notify_all();
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) failure = std::current_exception();
                next_frame.store(frames.count);
                cv.notify_all();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);

    std::size_t emitted = 0;
    {
        std::unique_lock<std::mutex> lock(mu);
        while (emitted < frames.count) {
            cv.wait(lock, [&] { return failure || done.count(emitted) > 0; });
            if (failure) break;
            FrameResult fr = std::move(done.at(emitted));
            done.erase(emitted);
            lock.unlock();
            sink(emitted, std::move(fr));
            ++emitted;
            lock.lock();
        }
    }
    for (auto& t : pool) t.join();
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const DataError&) {
            throw;
        } catch (const std::exception& e) {
            throw DataError(std::string("pairwise registration failed: ") + e.what());
        }
    }
}

}  // namespace

std::string to_string(FilterMode mode) {
    switch (mode) {
        case FilterMode::sequential: return "sequential";
        case FilterMode::pairwise: return "pairwise";
        case FilterMode::concat: return "concat";
        case FilterMode::smoothing: return "smoothing";
    }
    return "unknown";
}

FilterMode parse_filter_mode(const std::string& name) {
    if (name == "sequential") return FilterMode::sequential;
    if (name == "pairwise") return FilterMode::pairwise;
    if (name == "concat") return FilterMode::concat;
    if (name == "smoothing") return FilterMode::smoothing;
    throw std::invalid_argument("unknown filter mode: " + name);
}

void filter_series_stream(const Volume3& tmpl, const FrameProvider& frames,
                          const RegConfig& cfg, FilterMode mode, const FrameSink& sink,
                          int workers) {
    cfg.validate();
    if (frames.count == 0) {
        throw std::invalid_argument("filter_series: series must contain at least one frame");
    }
    switch (mode) {
        case FilterMode::sequential:
            run_sequential(tmpl, frames, cfg, sink);
            return;
        case FilterMode::pairwise:
            run_pairwise(tmpl, frames, cfg, sink, workers);
            return;
        case FilterMode::concat:
            run_concat(tmpl, frames, cfg, sink);
            return;
        case FilterMode::smoothing:
            throw std::invalid_argument(
                "filter mode 'smoothing' is reserved for a backward pass and not implemented");
    }
    throw std::invalid_argument("unknown filter mode");
}

SeriesResult filter_series(const SeriesInput& input, const RegConfig& cfg, FilterMode mode,
                           int workers) {
    if (input.labels && !(input.labels->dims == input.template_vol.dims)) {
        throw std::invalid_argument("filter_series: labels grid does not match template");
    }
    SeriesResult result;
    result.mode = mode;
    result.frames.resize(input.frames.size());
    FrameProvider provider{input.frames.size(),
                           [&input](std::size_t i) { return input.frames[i]; }};
    filter_series_stream(
        input.template_vol, provider, cfg, mode,
        [&result](std::size_t i, FrameResult&& fr) { result.frames[i] = std::move(fr); },
        workers);
    return result;
}

std::vector<LabelMap> propagate_labels(const SeriesResult& result, const LabelMap& labels,
                                       const std::vector<std::size_t>& frame_indices) {
    std::vector<LabelMap> out;
    out.reserve(frame_indices.size());
    for (const std::size_t idx : frame_indices) {
        if (idx >= result.frames.size()) {
            std::ostringstream msg;
            msg << "propagate_labels: frame index " << idx << " out of range (have "
                << result.frames.size() << " frames)";
            throw std::invalid_argument(msg.str());
        }
        out.push_back(warp_labels_nn(labels, result.frames[idx].inverse));
    }
    return out;
}

}  // namespace tempreg
