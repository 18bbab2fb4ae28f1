// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tempreg/metrics.hpp"
#include "tempreg/series.hpp"

using namespace tempreg;

namespace {

// Small fast budget for series tests.
RegConfig quick_cfg() {
    RegConfig cfg;
    cfg.pyramid_levels = 2;
    cfg.iters_per_level = {20, 15};
    return cfg;
}

// Drifting-translation phantom: the template content slides +drift voxels per
// frame along x inside a smooth envelope (pure translation near the center),
// rendered by warping the template with known velocities.
struct TranslationPhantom {
    Volume3 tmpl;
    std::vector<Volume3> frames;
    std::vector<VelocityField> gt_velocities;
};

TranslationPhantom translation_phantom(Dims3 dims, int n_frames, double drift,
                                       std::uint64_t seed) {
    TranslationPhantom ph;
    ph.tmpl = test::blob_volume(dims, {dims.nx / 2.0 - 1, dims.ny / 2.0, dims.nz / 2.0},
                                dims.nx / 7.0, 120.0f, seed);
    const double c = dims.nx / 2.0, sv = dims.nx / 3.5;
    for (int n = 0; n < n_frames; ++n) {
        VelocityField v(dims, {1, 1, 1});
        const double amp = drift * n;
        for (int z = 0; z < dims.nz; ++z) {
            for (int y = 0; y < dims.ny; ++y) {
                for (int x = 0; x < dims.nx; ++x) {
                    const double r2 = ((x - c) * (x - c) + (y - c) * (y - c) +
                                       (z - c) * (z - c)) /
                                      (sv * sv);
                    v.set(x, y, z, {amp * std::exp(-0.5 * r2), 0.0, 0.0});
                }
            }
        }
        ph.frames.push_back(n == 0 ? ph.tmpl
                                   : warp_volume(ph.tmpl, exp_velocity(negated(v))));
        ph.gt_velocities.push_back(std::move(v));
    }
    return ph;
}

}  // namespace

TEST_SUITE("series") {

TEST_CASE("static series stays near identity in all modes") {
    const Volume3 tmpl = test::tapered(test::textured_volume({20, 20, 20}, 80));
    SeriesInput input;
    input.template_vol = tmpl;
    for (int i = 0; i < 4; ++i) input.frames.push_back(tmpl);
    for (const FilterMode mode :
         {FilterMode::sequential, FilterMode::pairwise, FilterMode::concat}) {
        const SeriesResult res = filter_series(input, quick_cfg(), mode);
        REQUIRE(res.frames.size() == 4);
        for (const FrameResult& fr : res.frames) {
            CHECK(test::mean_interior_magnitude(fr.forward) < 0.1);
        }
    }
}

TEST_CASE("sequential mode tracks a drifting translation") {
    const TranslationPhantom ph = translation_phantom({24, 24, 24}, 6, 0.4, 90);
    SeriesInput input{ph.tmpl, ph.frames, std::nullopt};
    const SeriesResult res = filter_series(input, quick_cfg(), FilterMode::sequential);
    for (std::size_t n = 0; n < ph.frames.size(); ++n) {
        const DisplacementField gt = exp_velocity(ph.gt_velocities[n]);
        const EpeStats epe = endpoint_error(res.frames[n].forward, gt);
        CHECK(epe.mean < 0.5);
    }
}

TEST_CASE("concatenation accumulates more endpoint error than filtering") {
    const TranslationPhantom ph = translation_phantom({24, 24, 24}, 8, 0.5, 91);
    SeriesInput input{ph.tmpl, ph.frames, std::nullopt};
    const SeriesResult seq = filter_series(input, quick_cfg(), FilterMode::sequential);
    const SeriesResult cat = filter_series(input, quick_cfg(), FilterMode::concat);
    const std::size_t last = ph.frames.size() - 1;
    const DisplacementField gt = exp_velocity(ph.gt_velocities[last]);
    const double seq_err = endpoint_error(seq.frames[last].forward, gt).mean;
    const double cat_err = endpoint_error(cat.frames[last].forward, gt).mean;
    CHECK(cat_err >= seq_err);
}

TEST_CASE("all modes coincide on a single-frame series") {
    const Volume3 tmpl = test::tapered(test::textured_volume({18, 18, 18}, 92));
    const Volume3 frame = test::tapered(test::textured_volume({18, 18, 18}, 93));
    SeriesInput input{tmpl, {frame}, std::nullopt};
    RegConfig cfg = quick_cfg();
    cfg.lambda2 = 0.5;  // must not matter for frame 1
    const SeriesResult a = filter_series(input, cfg, FilterMode::sequential);
    const SeriesResult b = filter_series(input, cfg, FilterMode::pairwise);
    const SeriesResult c = filter_series(input, cfg, FilterMode::concat);
    CHECK(a.frames[0].velocity.data == b.frames[0].velocity.data);
    CHECK(a.frames[0].velocity.data == c.frames[0].velocity.data);
    CHECK(a.frames[0].forward.data == b.frames[0].forward.data);
}

TEST_CASE("sequential filtering is causal: truncated runs bit-match") {
    const TranslationPhantom ph = translation_phantom({20, 20, 20}, 5, 0.4, 94);
    SeriesInput full{ph.tmpl, ph.frames, std::nullopt};
    SeriesInput head = full;
    head.frames.resize(3);
    const SeriesResult rf = filter_series(full, quick_cfg(), FilterMode::sequential);
    const SeriesResult rh = filter_series(head, quick_cfg(), FilterMode::sequential);
    for (std::size_t n = 0; n < 3; ++n) {
        CHECK(rf.frames[n].velocity.data == rh.frames[n].velocity.data);
        CHECK(rf.frames[n].forward.data == rh.frames[n].forward.data);
        CHECK(rf.frames[n].inverse.data == rh.frames[n].inverse.data);
    }
}

TEST_CASE("sequential warm starts carry the previous frame's estimate exactly") {
    const TranslationPhantom ph = translation_phantom({20, 20, 20}, 4, 0.4, 95);
    SeriesInput input{ph.tmpl, ph.frames, std::nullopt};
    const SeriesResult res = filter_series(input, quick_cfg(), FilterMode::sequential);
    CHECK(res.frames[0].init_velocity.empty());
    for (std::size_t n = 1; n < res.frames.size(); ++n) {
        CHECK(res.frames[n].init_velocity.data == res.frames[n - 1].velocity.data);
    }
}

TEST_CASE("pairwise mode is independent of the worker count") {
    const TranslationPhantom ph = translation_phantom({20, 20, 20}, 4, 0.5, 96);
    SeriesInput input{ph.tmpl, ph.frames, std::nullopt};
    const SeriesResult serial = filter_series(input, quick_cfg(), FilterMode::pairwise, 1);
    const SeriesResult threaded = filter_series(input, quick_cfg(), FilterMode::pairwise, 3);
    REQUIRE(serial.frames.size() == threaded.frames.size());
    for (std::size_t n = 0; n < serial.frames.size(); ++n) {
        CHECK(serial.frames[n].velocity.data == threaded.frames[n].velocity.data);
    }
}

TEST_CASE("streaming loads frames on demand, in order, exactly once") {
    const TranslationPhantom ph = translation_phantom({20, 20, 20}, 4, 0.4, 97);
    std::vector<int> loads(ph.frames.size(), 0);
    std::size_t expected_next = 0;
    FrameProvider provider{ph.frames.size(), [&](std::size_t i) {
                               CHECK(i == expected_next);
                               ++expected_next;
                               ++loads[i];
                               return ph.frames[i];
                           }};
    std::size_t emitted = 0;
    filter_series_stream(ph.tmpl, provider, quick_cfg(), FilterMode::sequential,
                         [&](std::size_t i, FrameResult&&) {
                             CHECK(i == emitted);
                             ++emitted;
                             // the next frame is not loaded before this one is emitted
                             CHECK(expected_next == i + 1);
                         });
    CHECK(emitted == ph.frames.size());
    for (const int l : loads) CHECK(l == 1);
}

TEST_CASE("label propagation through estimated fields") {
    const Dims3 dims{24, 24, 24};
    const TranslationPhantom ph = translation_phantom(dims, 4, 0.5, 98);
    LabelMap labels(dims, {1, 1, 1});
    labels.label_names[1] = "blob";
    for (int z = 8; z < 16; ++z)
        for (int y = 8; y < 16; ++y)
            for (int x = 7; x < 15; ++x) labels.at(x, y, z) = 1;

    SeriesInput input{ph.tmpl, ph.frames, labels};
    const SeriesResult res = filter_series(input, quick_cfg(), FilterMode::sequential);
    const std::vector<LabelMap> props = propagate_labels(res, labels, {0, 3});

    // frame 1 is the template itself: near-identity propagation
    CHECK(dice(props[0], labels, 1) > 0.99);

    // frame 4: compare against labels carried by the ground-truth field
    const LabelMap gt_labels =
        warp_labels_nn(labels, exp_velocity(negated(ph.gt_velocities[3])));
    CHECK(dice(props[1], gt_labels, 1) > 0.9);

    // empty labels propagate to empty labels
    LabelMap empty(dims, {1, 1, 1});
    const std::vector<LabelMap> none = propagate_labels(res, empty, {2});
    for (const std::uint16_t v : none[0].data) CHECK(v == 0);

    CHECK_THROWS_AS(propagate_labels(res, labels, {99}), std::invalid_argument);
}

TEST_CASE("mode parsing and the reserved smoothing mode") {
    CHECK(parse_filter_mode("sequential") == FilterMode::sequential);
    CHECK(parse_filter_mode("pairwise") == FilterMode::pairwise);
    CHECK(parse_filter_mode("concat") == FilterMode::concat);
    CHECK_THROWS_AS(parse_filter_mode("bogus"), std::invalid_argument);

    const Volume3 tmpl = test::tapered(test::textured_volume({16, 16, 16}, 99));
    SeriesInput input{tmpl, {tmpl}, std::nullopt};
    CHECK_THROWS_AS(filter_series(input, quick_cfg(), FilterMode::smoothing),
                    std::invalid_argument);
}

TEST_CASE("frame grid mismatches abort with the frame index") {
    const Volume3 tmpl = test::tapered(test::textured_volume({16, 16, 16}, 100));
    SeriesInput input{tmpl, {tmpl, test::textured_volume({16, 16, 15}, 100)}, std::nullopt};
    try {
        filter_series(input, quick_cfg(), FilterMode::sequential);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("frame 2") != std::string::npos);
    }
}

}  // TEST_SUITE
