"""RKHS norm estimation from nested kernel interpolants."""

from ._core import (
    BoundError,
    ConditioningError,
    DivergenceError,
    Error,
    FitError,
    Interpolant,
    InvalidArgument,
    KernelSpec,
    NormTrace,
    algorithm1,
    algorithm2,
    analytic_norm,
    build_trace,
    estimate,
    exp_kernel_norm,
    fill_distance,
    fit_powerlaw,
    fit_saturating,
    interpolate,
    kernel_matrix,
    power_function,
    registry,
    sample_function,
    separation_distance,
    trace_from_table,
)

__all__ = [
    "BoundError",
    "ConditioningError",
    "DivergenceError",
    "Error",
    "FitError",
    "Interpolant",
    "InvalidArgument",
    "KernelSpec",
    "NormTrace",
    "algorithm1",
    "algorithm2",
    "analytic_norm",
    "build_trace",
    "estimate",
    "exp_kernel_norm",
    "fill_distance",
    "fit_powerlaw",
    "fit_saturating",
    "interpolate",
    "kernel_matrix",
    "power_function",
    "registry",
    "sample_function",
    "separation_distance",
    "trace_from_table",
]
