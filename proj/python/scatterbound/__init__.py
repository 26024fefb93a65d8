"""2D inverse medium scattering toolkit: forward far fields, factorization-method
indicators and monotonicity-based bounds for boundary values of the contrast."""

from ._core import (
    Contrast,
    FarFieldMatrix,
    ForwardConfig,
    NumericalError,
    PreconditionError,
    annulus_counts,
    boundary_trace,
    calibrate_orientation,
    comparison_matrix,
    constant_bound_search,
    eig_general,
    far_field_matrix,
    fm_indicator,
    load_constant_bank,
    msharp_matrix,
    operator_diagnostics,
    read_ffo,
    scattering_matrix,
    write_ffo,
)

__all__ = [
    "Contrast",
    "FarFieldMatrix",
    "ForwardConfig",
    "NumericalError",
    "PreconditionError",
    "annulus_counts",
    "boundary_trace",
    "calibrate_orientation",
    "comparison_matrix",
    "constant_bound_search",
    "eig_general",
    "far_field_matrix",
    "fm_indicator",
    "load_constant_bank",
    "msharp_matrix",
    "operator_diagnostics",
    "read_ffo",
    "scattering_matrix",
    "write_ffo",
]
