"""Reference PDE solvers built on DSC differentiation matrices."""

from .electrostatics import (
    EPS0,
    ChargePatch,
    ElectrostaticsProblem,
    charged_patch,
    probe,
    solve_electrostatics,
    source_term,
)
from .reports import EigenReport, ErrorTrace, FieldReport
from .wave import (
    WavePropagationProblem,
    discrete_energy,
    exact_solution,
    propagate_wave,
    stable_time_step,
)
from .waveguide import WaveguideProblem, shape_mask, solve_waveguide, square_spectrum

__all__ = [
    "EPS0",
    "ChargePatch",
    "ElectrostaticsProblem",
    "charged_patch",
    "probe",
    "solve_electrostatics",
    "source_term",
    "EigenReport",
    "ErrorTrace",
    "FieldReport",
    "WavePropagationProblem",
    "discrete_energy",
    "exact_solution",
    "propagate_wave",
    "stable_time_step",
    "WaveguideProblem",
    "shape_mask",
    "solve_waveguide",
    "square_spectrum",
]
