"""
Electrostatic potential in a grounded rectangular box.

Solves ``V_xx + V_yy = -rho / (eps0 eps_r)`` on the interior nodes with the
four edge potentials prescribed. Each 1-D second-derivative matrix folds
its fictitious nodes with the antisymmetric extension about the edge value,
``V(x_-i) = 2 V(x_0) - V(x_i)``, so the edge columns carry known values and
move to the right-hand side.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..discretization import (
    SIMPLY_SUPPORTED,
    FieldSamples,
    Grid,
    build_diff_matrix,
    build_weights,
    interpolate,
)
from ..errors import NumericFailure, ParameterDomainError
from ..kernels import KernelFamily, KernelParams
from .reports import FieldReport

__all__ = [
    "EPS0",
    "ChargePatch",
    "charged_patch",
    "ElectrostaticsProblem",
    "solve_electrostatics",
    "source_term",
    "probe",
]

EPS0 = 1e-9 / (36.0 * math.pi)  # F/m


@dataclass(frozen=True)
class ChargePatch:
    """Uniform charge density ``density`` [C/m^2] over a closed rectangle."""

    x_range: tuple
    y_range: tuple
    density: float
    eps_r: float = 1.0

    def __post_init__(self):
        if not self.eps_r > 0:
            raise ParameterDomainError(f"relative permittivity must be > 0, got {self.eps_r}")
        for lo, hi in (self.x_range, self.y_range):
            if not lo < hi:
                raise ParameterDomainError(f"empty patch range ({lo}, {hi})")

    def contains(self, x, y):
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        return (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)


@dataclass(frozen=True, eq=False)
class ElectrostaticsProblem:
    """Box problem on a square node grid.

    ``potentials`` gives the edge values (volts) as ``(left, right, bottom,
    top)``, i.e. at ``x = lo``, ``x = hi``, ``y = lo`` and ``y = hi``.
    """

    grid: Grid
    kernel: KernelParams
    potentials: tuple = (0.0, 0.0, 0.0, 10.0)
    patches: tuple = ()

    def __post_init__(self):
        g = self.grid
        if g.dims != 2:
            raise ParameterDomainError("electrostatics grid must be 2-D")
        if len(self.potentials) != 4:
            raise ParameterDomainError("potentials must be (left, right, bottom, top)")
        object.__setattr__(self, "patches", tuple(self.patches))
        hi = [g.origin[a] + g.spacing[a] * (g.counts[a] - 1) for a in (0, 1)]
        for p in self.patches:
            for (lo_p, hi_p), lo_b, hi_b in zip((p.x_range, p.y_range), g.origin, hi):
                if not (lo_b < lo_p and hi_p < hi_b):
                    raise ParameterDomainError(
                        f"patch {p.x_range} x {p.y_range} must lie inside the open box"
                    )

    @classmethod
    def box(cls, n=32, side=1.0, half_bandwidth=None, ratio=3.2,
            family=KernelFamily.SHANNON, potentials=(0.0, 0.0, 0.0, 10.0), patches=()):
        """``n`` nodes per side on ``[0, side]^2``; M defaults to ``n - 1``."""
        grid = Grid.uniform(0.0, side, n, dims=2)
        m = n - 1 if half_bandwidth is None else half_bandwidth
        kernel = KernelParams.from_ratio(family, grid.spacing[0], ratio, m)
        return cls(grid, kernel, potentials, patches)


def charged_patch():
    """The 0.18 m x 0.16 m patch, 1e-7 C/m^2 in a material with eps_r = 100."""
    return ChargePatch((0.41, 0.59), (0.72, 0.88), 1e-7, 100.0)


def source_term(problem):
    """``rho / (eps0 eps_r)`` sampled on the nodes, zero outside patches."""
    x, y = problem.grid.mesh()
    out = np.zeros(problem.grid.shape)
    for p in problem.patches:
        out[p.contains(x, y)] += p.density / (EPS0 * p.eps_r)
    return out


def _edge_values(problem):
    g = problem.grid
    left, right, bottom, top = (float(v) for v in problem.potentials)
    v = np.zeros(g.shape)
    v[:, 0] = bottom
    v[:, -1] = top
    # side walls own the corners
    v[0, :] = left
    v[-1, :] = right
    return v


def solve_electrostatics(problem):
    """Potential on every node of the box, with a centre probe.

    Returns
    -------
    FieldReport
        ``probes`` maps ``"center"`` to the DSC-interpolated potential at the
        box centre.
    """
    g = problem.grid
    nx, ny = g.counts
    mats = []
    for axis in (0, 1):
        params = problem.kernel
        if not math.isclose(g.spacing[axis], params.delta, rel_tol=1e-12):
            params = KernelParams(
                params.family, g.spacing[axis], params.ratio * g.spacing[axis],
                params.half_bandwidth, params.order,
            )
        mats.append(build_diff_matrix(g.counts[axis], axis, build_weights(params, 2), SIMPLY_SUPPORTED))
    dx, dy = (m.dense() for m in mats)
    ax, ay = dx[1:-1, 1:-1], dy[1:-1, 1:-1]
    op = np.kron(ax, np.eye(ny - 2)) + np.kron(np.eye(nx - 2), ay)

    edges = _edge_values(problem)
    rhs = -source_term(problem)[1:-1, 1:-1]
    # known edge values times the folded edge columns
    rhs = rhs - np.outer(dx[1:-1, 0], edges[0, 1:-1]) - np.outer(dx[1:-1, -1], edges[-1, 1:-1])
    rhs = rhs - np.outer(edges[1:-1, 0], dy[1:-1, 0]) - np.outer(edges[1:-1, -1], dy[1:-1, -1])
    try:
        lu = scipy.linalg.lu_factor(op, check_finite=True)
        if np.min(np.abs(np.diag(lu[0]))) < 1e-13 * np.max(np.abs(np.diag(lu[0]))):
            raise NumericFailure("singular potential system")
        sol = scipy.linalg.lu_solve(lu, rhs.ravel())
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NumericFailure(f"linear solve failed: {exc}") from exc
    values = edges.copy()
    values[1:-1, 1:-1] = sol.reshape(nx - 2, ny - 2)
    field_ = FieldSamples(g, values)
    hi = [g.origin[a] + g.spacing[a] * (g.counts[a] - 1) for a in (0, 1)]
    centre = tuple(0.5 * (lo + h) for lo, h in zip(g.origin, hi))
    probes = {"center": probe(field_, problem.kernel, *centre)}
    meta = {
        "unknowns": (nx - 2) * (ny - 2),
        "patch_nodes": int(np.count_nonzero(source_term(problem))),
        "half_bandwidth": problem.kernel.half_bandwidth,
        "sigma_over_delta": problem.kernel.ratio,
    }
    return FieldReport(field_, probes, meta)


def probe(samples, kernel, x, y):
    """Tensor-product DSC interpolant of a 2-D field at ``(x, y)``.

    Lines are extended past the walls with the same antisymmetric fold the
    solver uses.
    """
    g = samples.grid
    ky = KernelParams(kernel.family, g.spacing[1], kernel.ratio * g.spacing[1],
                      kernel.half_bandwidth, kernel.order)
    kx = KernelParams(kernel.family, g.spacing[0], kernel.ratio * g.spacing[0],
                      kernel.half_bandwidth, kernel.order)
    column = np.array([
        interpolate(samples.values[i], ky, y, SIMPLY_SUPPORTED, g.origin[1])
        for i in range(g.counts[0])
    ])
    return float(interpolate(column, kx, x, SIMPLY_SUPPORTED, g.origin[0]))
