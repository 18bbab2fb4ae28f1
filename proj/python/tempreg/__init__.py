# Copyright (c) 2026 tempreg contributors.
# SPDX-License-Identifier: Apache-2.0
"""Temporal registration of volumetric image time series.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._tempreg import (  # noqa: F401
    CcConfig,
    ConvergenceError,
    DataError,
    DisplacementField,
    EpeStats,
    FilterMode,
    FrameResult,
    LabelMap,
    PhantomSeries,
    PhantomSpec,
    RegConfig,
    RegResult,
    SeriesResult,
    TraceEntry,
    VelocityField,
    Volume3,
    cc_gradient,
    compose,
    dice,
    downsample_by_two,
    endpoint_error,
    exp_velocity,
    field_sq_norm,
    filter_series,
    gaussian_smooth,
    gen_phantom,
    invert,
    jacobian_determinant,
    local_cc,
    min_jacobian_determinant,
    negated_velocity,
    objective,
    propagate_labels,
    read_field,
    read_labels,
    read_volume,
    register_pair,
    resample_to_isotropic,
    smooth_field,
    trilinear_sample,
    warp_labels_nn,
    warp_volume,
    write_field,
    write_labels,
    write_volume,
)

__all__ = [name for name in dir() if not name.startswith("_")]
