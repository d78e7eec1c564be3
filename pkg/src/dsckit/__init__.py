"""
dsckit: discrete singular convolution kernels, weights and solvers.

Submodules
----------
kernels         regularized DSC kernels, derivatives, parameter advice
zoo             classical delta sequences and convergence probes
discretization  weight tables, boundary folds, differentiation matrices
solvers         waveguide, electrostatics and wave propagation
cli             command-line harness
"""

from . import errors
from .discretization import (
    PERIODIC,
    SIMPLY_SUPPORTED,
    BoundaryKind,
    BoundarySpec,
    DiffMatrix,
    FieldSamples,
    Grid,
    WeightTable,
    apply_derivative,
    boundary_coeffs,
    build_diff_matrix,
    build_weights,
    interpolate,
)
from .kernels import (
    KernelFamily,
    KernelParams,
    ParameterAdvice,
    advise_parameters,
    eval_derivative,
    eval_kernel,
    eval_shannon_wavelet,
    normalization,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "PERIODIC",
    "SIMPLY_SUPPORTED",
    "BoundaryKind",
    "BoundarySpec",
    "DiffMatrix",
    "FieldSamples",
    "Grid",
    "WeightTable",
    "apply_derivative",
    "boundary_coeffs",
    "build_diff_matrix",
    "build_weights",
    "interpolate",
    "KernelFamily",
    "KernelParams",
    "ParameterAdvice",
    "advise_parameters",
    "eval_derivative",
    "eval_kernel",
    "eval_shannon_wavelet",
    "normalization",
]
