"""Result records returned by the solvers."""

from dataclasses import dataclass, field

import numpy as np

from ..discretization import FieldSamples


@dataclass(frozen=True, eq=False)
class EigenReport:
    """Ascending eigenvalues ``k^2`` with errors against an analytic spectrum.

    ``analytic`` and ``errors`` are None when no closed form is known
    (masked geometries). ``modes`` holds eigenvectors scattered back onto the
    full grid, shape ``(n_modes,) + grid.shape``, when requested.
    """

    eigenvalues: np.ndarray
    analytic: np.ndarray = None
    errors: np.ndarray = None
    imag_residue: float = 0.0
    modes: np.ndarray = None
    metadata: dict = field(default_factory=dict)

    def rows(self):
        out = []
        for i, lam in enumerate(self.eigenvalues, start=1):
            exact = np.nan if self.analytic is None else self.analytic[i - 1]
            err = np.nan if self.errors is None else self.errors[i - 1]
            out.append((i, float(lam), float(exact), float(err)))
        return out


@dataclass(frozen=True, eq=False)
class FieldReport:
    """A solved field plus named point probes."""

    field: FieldSamples
    probes: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class ErrorTrace:
    """``(time, L_inf error)`` samples of a time integration."""

    times: np.ndarray
    errors: np.ndarray
    dt: float
    energy: np.ndarray = None
    final: FieldSamples = None
    metadata: dict = field(default_factory=dict)

    def rows(self):
        return [(float(t), float(e)) for t, e in zip(self.times, self.errors)]
