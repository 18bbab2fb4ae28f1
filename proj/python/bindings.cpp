// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tempreg/io.hpp"
#include "tempreg/metrics.hpp"
#include "tempreg/phantom.hpp"
#include "tempreg/series.hpp"

namespace py = pybind11;
using namespace tempreg;

namespace {

// Arrays are exposed C-ordered as (nz, ny, nx[, 3]) so the x-fastest memory
// layout maps 1:1 onto numpy without copies on the C++ side.

py::array_t<float> volume_to_array(const Volume3& vol) {
    py::array_t<float> arr({vol.dims.nz, vol.dims.ny, vol.dims.nx});
    std::memcpy(arr.mutable_data(), vol.data.data(), vol.data.size() * sizeof(float));
    return arr;
}

Volume3 volume_from_array(py::array_t<float, py::array::c_style | py::array::forcecast> arr,
                          Spacing3 spacing, float background) {
    if (arr.ndim() != 3) {
        throw std::invalid_argument("expected a 3-d array (nz, ny, nx)");
    }
    Volume3 vol(Dims3{static_cast<int>(arr.shape(2)), static_cast<int>(arr.shape(1)),
                      static_cast<int>(arr.shape(0))},
                spacing, 0.0f, background);
    std::memcpy(vol.data.data(), arr.data(), vol.data.size() * sizeof(float));
    return vol;
}

py::array_t<std::uint16_t> labels_to_array(const LabelMap& labels) {
    py::array_t<std::uint16_t> arr({labels.dims.nz, labels.dims.ny, labels.dims.nx});
    std::memcpy(arr.mutable_data(), labels.data.data(),
                labels.data.size() * sizeof(std::uint16_t));
    return arr;
}

LabelMap labels_from_array(
    py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast> arr,
    Spacing3 spacing) {
    if (arr.ndim() != 3) {
        throw std::invalid_argument("expected a 3-d array (nz, ny, nx)");
    }
    LabelMap labels(Dims3{static_cast<int>(arr.shape(2)), static_cast<int>(arr.shape(1)),
                          static_cast<int>(arr.shape(0))},
                    spacing);
    std::memcpy(labels.data.data(), arr.data(), labels.data.size() * sizeof(std::uint16_t));
    return labels;
}

template <class Tag>
py::array_t<float> field_to_array(const Field3<Tag>& f) {
    py::array_t<float> arr({f.dims.nz, f.dims.ny, f.dims.nx, 3});
    std::memcpy(arr.mutable_data(), f.data.data(), f.data.size() * sizeof(float));
    return arr;
}

template <class Tag>
Field3<Tag> field_from_array(
    py::array_t<float, py::array::c_style | py::array::forcecast> arr, Spacing3 spacing) {
    if (arr.ndim() != 4 || arr.shape(3) != 3) {
        throw std::invalid_argument("expected a 4-d array (nz, ny, nx, 3)");
    }
    Field3<Tag> f(Dims3{static_cast<int>(arr.shape(2)), static_cast<int>(arr.shape(1)),
                        static_cast<int>(arr.shape(0))},
                  spacing);
    std::memcpy(f.data.data(), arr.data(), f.data.size() * sizeof(float));
    return f;
}

Spacing3 spacing_from_tuple(const std::tuple<double, double, double>& t) {
    return Spacing3{std::get<0>(t), std::get<1>(t), std::get<2>(t)};
}

}  // namespace

PYBIND11_MODULE(_tempreg, m) {
    m.doc() = "Temporal registration of volumetric image time series";

    py::register_exception<DataError>(m, "DataError");
    py::register_exception<ConvergenceError>(m, "ConvergenceError");

    py::class_<Volume3>(m, "Volume3")
        .def(py::init([](py::array_t<float, py::array::c_style | py::array::forcecast> arr,
                         std::tuple<double, double, double> spacing, float background) {
                 return volume_from_array(arr, spacing_from_tuple(spacing), background);
             }),
             py::arg("data"), py::arg("spacing") = std::make_tuple(1.0, 1.0, 1.0),
             py::arg("background") = 0.0f)
        .def_property_readonly("shape",
                               [](const Volume3& v) {
                                   return std::make_tuple(v.dims.nz, v.dims.ny, v.dims.nx);
                               })
        .def_property_readonly("spacing",
                               [](const Volume3& v) {
                                   return std::make_tuple(v.spacing.sx, v.spacing.sy,
                                                          v.spacing.sz);
                               })
        .def_readwrite("background", &Volume3::background)
        .def("to_numpy", &volume_to_array);

    py::class_<LabelMap>(m, "LabelMap")
        .def(py::init(
                 [](py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>
                        arr,
                    std::tuple<double, double, double> spacing) {
                     return labels_from_array(arr, spacing_from_tuple(spacing));
                 }),
             py::arg("data"), py::arg("spacing") = std::make_tuple(1.0, 1.0, 1.0))
        .def_property_readonly("shape",
                               [](const LabelMap& v) {
                                   return std::make_tuple(v.dims.nz, v.dims.ny, v.dims.nx);
                               })
        .def_readwrite("label_names", &LabelMap::label_names)
        .def("to_numpy", &labels_to_array);

    py::class_<VelocityField>(m, "VelocityField")
        .def(py::init([](py::array_t<float, py::array::c_style | py::array::forcecast> arr,
                         std::tuple<double, double, double> spacing) {
                 return field_from_array<VelocityTag>(arr, spacing_from_tuple(spacing));
             }),
             py::arg("data"), py::arg("spacing") = std::make_tuple(1.0, 1.0, 1.0))
        .def("to_numpy", &field_to_array<VelocityTag>);

    py::class_<DisplacementField>(m, "DisplacementField")
        .def(py::init([](py::array_t<float, py::array::c_style | py::array::forcecast> arr,
                         std::tuple<double, double, double> spacing) {
                 return field_from_array<DisplacementTag>(arr, spacing_from_tuple(spacing));
             }),
             py::arg("data"), py::arg("spacing") = std::make_tuple(1.0, 1.0, 1.0))
        .def("to_numpy", &field_to_array<DisplacementTag>);

    py::class_<CcConfig>(m, "CcConfig")
        .def(py::init<>())
        .def_readwrite("radius", &CcConfig::radius)
        .def_readwrite("epsilon", &CcConfig::epsilon);

    py::class_<RegConfig>(m, "RegConfig")
        .def(py::init<>())
        .def_readwrite("lambda1", &RegConfig::lambda1)
        .def_readwrite("lambda2", &RegConfig::lambda2)
        .def_readwrite("sigma_fluid", &RegConfig::sigma_fluid)
        .def_readwrite("sigma_elastic", &RegConfig::sigma_elastic)
        .def_readwrite("step_size", &RegConfig::step_size)
        .def_readwrite("pyramid_levels", &RegConfig::pyramid_levels)
        .def_readwrite("iters_per_level", &RegConfig::iters_per_level)
        .def_readwrite("converge_tol", &RegConfig::converge_tol)
        .def_readwrite("symmetric_forces", &RegConfig::symmetric_forces)
        .def_readwrite("cc", &RegConfig::cc);

    py::class_<TraceEntry>(m, "TraceEntry")
        .def_readonly("iteration", &TraceEntry::iteration)
        .def_readonly("data_term", &TraceEntry::data_term)
        .def_readonly("temporal_term", &TraceEntry::temporal_term)
        .def_readonly("level", &TraceEntry::level)
        .def("total", &TraceEntry::total);

    py::class_<RegResult>(m, "RegResult")
        .def_readonly("velocity", &RegResult::velocity)
        .def_readonly("forward", &RegResult::forward)
        .def_readonly("inverse", &RegResult::inverse)
        .def_readonly("objective_trace", &RegResult::objective_trace)
        .def_readonly("converged", &RegResult::converged)
        .def_readonly("iterations", &RegResult::iterations)
        .def_readonly("final_data_term", &RegResult::final_data_term)
        .def_readonly("final_temporal_term", &RegResult::final_temporal_term)
        .def_readonly("min_jacobian", &RegResult::min_jacobian);

    py::enum_<FilterMode>(m, "FilterMode")
        .value("sequential", FilterMode::sequential)
        .value("pairwise", FilterMode::pairwise)
        .value("concat", FilterMode::concat)
        .value("smoothing", FilterMode::smoothing);

    py::class_<FrameResult>(m, "FrameResult")
        .def_readonly("velocity", &FrameResult::velocity)
        .def_readonly("forward", &FrameResult::forward)
        .def_readonly("inverse", &FrameResult::inverse)
        .def_readonly("data_term", &FrameResult::data_term)
        .def_readonly("min_jacobian", &FrameResult::min_jacobian)
        .def_readonly("iterations", &FrameResult::iterations)
        .def_readonly("seconds", &FrameResult::seconds)
        .def_readonly("converged", &FrameResult::converged);

    py::class_<SeriesResult>(m, "SeriesResult")
        .def_readonly("mode", &SeriesResult::mode)
        .def_readonly("frames", &SeriesResult::frames);

    py::class_<PhantomSpec>(m, "PhantomSpec")
        .def(py::init<>())
        .def_property(
            "dims",
            [](const PhantomSpec& s) { return std::make_tuple(s.dims.nx, s.dims.ny, s.dims.nz); },
            [](PhantomSpec& s, std::tuple<int, int, int> d) {
                s.dims = {std::get<0>(d), std::get<1>(d), std::get<2>(d)};
            })
        .def_readwrite("n_frames", &PhantomSpec::n_frames)
        .def_readwrite("seed", &PhantomSpec::seed)
        .def_readwrite("drift_amplitude", &PhantomSpec::drift_amplitude)
        .def_readwrite("drift_coherence", &PhantomSpec::drift_coherence)
        .def_readwrite("jump_probability", &PhantomSpec::jump_probability)
        .def_readwrite("jump_amplitude", &PhantomSpec::jump_amplitude)
        .def_readwrite("jump_frame", &PhantomSpec::jump_frame)
        .def_readwrite("velocity_smoothness_sigma", &PhantomSpec::velocity_smoothness_sigma)
        .def_readwrite("noise_sigma", &PhantomSpec::noise_sigma)
        .def_readwrite("intensity_drift_roi", &PhantomSpec::intensity_drift_roi)
        .def_readwrite("intensity_drift_fraction", &PhantomSpec::intensity_drift_fraction);

    py::class_<PhantomSeries>(m, "PhantomSeries")
        .def_readonly("template_vol", &PhantomSeries::template_vol)
        .def_readonly("labels", &PhantomSeries::labels)
        .def_readonly("frames", &PhantomSeries::frames)
        .def_readonly("gt_velocities", &PhantomSeries::gt_velocities)
        .def_readonly("gt_forward", &PhantomSeries::gt_forward)
        .def_readonly("gt_inverse", &PhantomSeries::gt_inverse);

    py::class_<EpeStats>(m, "EpeStats")
        .def_readonly("mean", &EpeStats::mean)
        .def_readonly("max", &EpeStats::max)
        .def_readonly("p95", &EpeStats::p95);

    // volume operations
    m.def("trilinear_sample",
          [](const Volume3& vol, double x, double y, double z) {
              return trilinear_sample(vol, {x, y, z});
          },
          py::arg("volume"), py::arg("x"), py::arg("y"), py::arg("z"));
    m.def("warp_volume", &warp_volume, py::arg("moving"), py::arg("field"));
    m.def("warp_labels_nn", &warp_labels_nn, py::arg("labels"), py::arg("field"));
    m.def("gaussian_smooth", &gaussian_smooth, py::arg("volume"), py::arg("sigma"));
    m.def("resample_to_isotropic", &resample_to_isotropic, py::arg("volume"),
          py::arg("target_spacing"));
    m.def("downsample_by_two", &downsample_by_two, py::arg("volume"));

    // deformation algebra
    m.def("exp_velocity",
          py::overload_cast<const VelocityField&>(&exp_velocity), py::arg("velocity"));
    m.def("exp_velocity",
          py::overload_cast<const VelocityField&, int>(&exp_velocity), py::arg("velocity"),
          py::arg("n_steps"));
    m.def("compose", &compose, py::arg("outer"), py::arg("inner"));
    m.def("invert", &invert, py::arg("field"), py::arg("iters") = 30, py::arg("tol") = 1e-2);
    m.def("jacobian_determinant", &jacobian_determinant, py::arg("field"));
    m.def("min_jacobian_determinant", &min_jacobian_determinant, py::arg("field"));
    m.def("negated_velocity", &negated<VelocityTag>, py::arg("velocity"));
    m.def("field_sq_norm", &field_sq_norm<DisplacementTag>, py::arg("field"));
    m.def("smooth_field", &smooth_field<DisplacementTag>, py::arg("field"), py::arg("sigma"));

    // similarity
    m.def("local_cc",
          [](const Volume3& fixed, const Volume3& warped, const CcConfig& cfg) {
              const CcResult res = local_cc(fixed, warped, cfg);
              return std::make_pair(res.total, res.map);
          },
          py::arg("fixed"), py::arg("warped"), py::arg("config") = CcConfig{});
    m.def("cc_gradient", &cc_gradient, py::arg("fixed"), py::arg("moving"),
          py::arg("current_field"), py::arg("config") = CcConfig{});

    // registration and filtering
    m.def("objective",
          [](const Volume3& tmpl, const Volume3& frame, const VelocityField& v,
             const VelocityField* v_prev, const RegConfig& cfg) {
              const ObjectiveValue obj = objective(tmpl, frame, v, v_prev, cfg);
              return std::make_tuple(obj.total, obj.data_term, obj.temporal_term);
          },
          py::arg("template_vol"), py::arg("frame"), py::arg("velocity"),
          py::arg("v_prev") = nullptr, py::arg("config") = RegConfig{});
    m.def("register_pair",
          [](const Volume3& tmpl, const Volume3& frame, const VelocityField* init,
             const VelocityField* v_prev, const RegConfig& cfg) {
              return register_pair(tmpl, frame, init, v_prev, cfg);
          },
          py::arg("template_vol"), py::arg("frame"), py::arg("init") = nullptr,
          py::arg("v_prev") = nullptr, py::arg("config") = RegConfig{},
          py::call_guard<py::gil_scoped_release>());
    m.def("filter_series",
          [](const Volume3& tmpl, const std::vector<Volume3>& frames, const RegConfig& cfg,
             FilterMode mode, int workers) {
              SeriesInput input{tmpl, frames, std::nullopt};
              return filter_series(input, cfg, mode, workers);
          },
          py::arg("template_vol"), py::arg("frames"), py::arg("config") = RegConfig{},
          py::arg("mode") = FilterMode::sequential, py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("propagate_labels", &propagate_labels, py::arg("result"), py::arg("labels"),
          py::arg("frame_indices"));

    // phantom and evaluation
    m.def("gen_phantom", &gen_phantom, py::arg("spec"),
          py::call_guard<py::gil_scoped_release>());
    m.def("dice", &dice, py::arg("a"), py::arg("b"), py::arg("label"));
    m.def("endpoint_error",
          [](const DisplacementField& est, const DisplacementField& gt, const LabelMap* mask,
             std::uint16_t label) { return endpoint_error(est, gt, mask, label); },
          py::arg("estimate"), py::arg("ground_truth"), py::arg("mask") = nullptr,
          py::arg("label") = 0);

    // file round trips
    m.def("read_volume", &read_volume, py::arg("path"));
    m.def("write_volume", &write_volume, py::arg("volume"), py::arg("path"));
    m.def("read_labels", &read_labels, py::arg("path"));
    m.def("write_labels", &write_labels, py::arg("labels"), py::arg("path"));
    m.def("read_field", &read_field, py::arg("path"));
    m.def("write_field",
          py::overload_cast<const DisplacementField&, const std::filesystem::path&>(
              &write_field),
          py::arg("field"), py::arg("path"));
}
