"""
Periodic scalar wave propagation, ``W_tt = (1/eps_nu) Laplacian W``.

The second-order equation is integrated as the first-order system
``(W, W_t)`` with classical fourth-order Runge-Kutta. The Laplacian is the
sum of periodic DSC second-derivative operators applied along each axis.
The initial field ``sin(a . x)`` has the travelling-wave solution
``sin(a . x + |a| t / sqrt(eps_nu))``.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..discretization import PERIODIC, FieldSamples, Grid, apply_derivative, build_diff_matrix, build_weights
from ..errors import DivergenceError, ParameterDomainError
from ..kernels import KernelFamily, KernelParams
from .reports import ErrorTrace

__all__ = [
    "WavePropagationProblem",
    "propagate_wave",
    "stable_time_step",
    "discrete_energy",
    "exact_solution",
    "BLOWUP",
]

SIDE = 10.0 * math.pi
BLOWUP = 1e3
# default step when none is given; keeps time error below the spatial error
DEFAULT_DT = 0.01
# RK4 stability interval on the imaginary axis is |z| <= 2 sqrt(2) ~ 2.8
_RK4_REACH = 2.8


@dataclass(frozen=True, eq=False)
class WavePropagationProblem:
    """Initial value problem on a periodic cube ``[0, 10 pi)^dims``.

    ``dt`` None picks the smaller of ``DEFAULT_DT`` and
    :func:`stable_time_step`. Errors are sampled every
    ``report_every`` time units from 0 to ``t_end``; ``dt`` is shrunk if
    needed so reports fall on steps.
    """

    grid: Grid
    kernel: KernelParams
    wavenumbers: tuple = (1.0, 1.0, 1.0)
    eps_nu: float = 1.0
    dt: float = None
    t_end: float = 10.0
    report_every: float = 1.0
    check_stability: bool = True
    track_energy: bool = False

    def __post_init__(self):
        g = self.grid
        if len(self.wavenumbers) != g.dims:
            raise ParameterDomainError(
                f"need {g.dims} wavenumbers, got {len(self.wavenumbers)}"
            )
        for a, h, n in zip(self.wavenumbers, g.spacing, g.counts):
            period = h * n
            cycles = a * period / (2.0 * math.pi)
            if abs(cycles - round(cycles)) > 1e-9:
                raise ParameterDomainError(
                    f"wavenumber {a} is not periodic on an axis of length {period}"
                )
        if not self.eps_nu > 0:
            raise ParameterDomainError(f"eps_nu must be positive, got {self.eps_nu}")
        if not self.t_end >= 0 or not self.report_every > 0:
            raise ParameterDomainError("need t_end >= 0 and report_every > 0")
        if self.dt is not None and not self.dt > 0:
            raise ParameterDomainError(f"dt must be positive, got {self.dt}")

    @classmethod
    def cube(cls, n, half_bandwidth=None, ratio=3.2, dims=3, family=KernelFamily.SHANNON, **kw):
        """``n`` periodic nodes per axis; M defaults to ``n``."""
        grid = Grid.uniform(0.0, SIDE, n, dims=dims, periodic=True)
        m = n if half_bandwidth is None else half_bandwidth
        kernel = KernelParams.from_ratio(family, grid.spacing[0], ratio, m)
        kw.setdefault("wavenumbers", (1.0,) * dims)
        return cls(grid, kernel, **kw)


def exact_solution(problem, t):
    mesh = problem.grid.mesh()
    phase = sum(a * x for a, x in zip(problem.wavenumbers, mesh))
    speed = math.sqrt(sum(a * a for a in problem.wavenumbers) / problem.eps_nu)
    return np.sin(phase + speed * t), speed * np.cos(phase + speed * t)


def _operators(problem, q):
    mats = []
    for axis in range(problem.grid.dims):
        k = problem.kernel
        h = problem.grid.spacing[axis]
        if not math.isclose(h, k.delta, rel_tol=1e-12):
            k = KernelParams(k.family, h, k.ratio * h, k.half_bandwidth, k.order)
        mats.append(build_diff_matrix(problem.grid, axis, build_weights(k, q), PERIODIC))
    return mats


def stable_time_step(problem, mats=None):
    """``0.5 * 2.8 / rho`` with ``rho = sqrt(dims * g / eps_nu)``.

    ``g`` bounds the spectral radius of the 1-D second-derivative operator
    by its largest absolute row sum.
    """
    mats = mats or _operators(problem, 2)
    bound = max(float(np.max(np.sum(np.abs(m.dense()), axis=1))) for m in mats)
    rho = math.sqrt(problem.grid.dims * bound / problem.eps_nu)
    return 0.5 * _RK4_REACH / rho


def _laplacian(w, mats):
    out = apply_derivative(w, 0, mats[0])
    for axis in range(1, len(mats)):
        out += apply_derivative(w, axis, mats[axis])
    return out


def discrete_energy(problem, w, v, mats=None):
    """``sum(v^2 - w * Lap(w) / eps_nu) * dV``.

    The second term is the summation-by-parts form of ``|grad w|^2`` for the
    discrete Laplacian used by the integrator, so this quantity is exactly
    conserved by the semi-discrete system.
    """
    mats = mats or _operators(problem, 2)
    cell = math.prod(problem.grid.spacing)
    return float(np.sum(v * v - w * _laplacian(w, mats) / problem.eps_nu) * cell)


def _schedule(problem, dt):
    n_reports = int(round(problem.t_end / problem.report_every))
    if abs(n_reports * problem.report_every - problem.t_end) > 1e-9 * max(1.0, problem.t_end):
        raise ParameterDomainError("t_end must be a multiple of report_every")
    per_report = max(1, math.ceil(problem.report_every / dt - 1e-9))
    return n_reports, per_report, problem.report_every / per_report


def propagate_wave(problem):
    """Integrate to ``t_end`` and record the L-infinity error at each report.

    Raises
    ------
    ParameterDomainError
        ``dt`` exceeds the stability estimate and ``check_stability`` is set.
    DivergenceError
        The field grows beyond 1e3 in magnitude.
    """
    mats = _operators(problem, 2)
    limit = stable_time_step(problem, mats)
    dt = min(limit, DEFAULT_DT) if problem.dt is None else problem.dt
    if problem.check_stability and dt > limit:
        raise ParameterDomainError(f"dt={dt} exceeds the RK4 stability estimate {limit:.6g}")
    n_reports, per_report, dt = _schedule(problem, dt)
    c = 1.0 / problem.eps_nu

    w, v = exact_solution(problem, 0.0)

    def rhs(w_, v_):
        return v_, c * _laplacian(w_, mats)

    times = [0.0]
    errors = [0.0]
    energy = [discrete_energy(problem, w, v, mats)] if problem.track_energy else None
    step = 0
    for report in range(1, n_reports + 1):
        for _ in range(per_report):
            k1w, k1v = rhs(w, v)
            k2w, k2v = rhs(w + 0.5 * dt * k1w, v + 0.5 * dt * k1v)
            k3w, k3v = rhs(w + 0.5 * dt * k2w, v + 0.5 * dt * k2v)
            k4w, k4v = rhs(w + dt * k3w, v + dt * k3v)
            w = w + dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
            v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            step += 1
            peak = float(np.max(np.abs(w)))
            if not peak <= BLOWUP:
                t_now = step * dt
                raise DivergenceError(f"field exceeded {BLOWUP:g} at t={t_now:.6g}", t_now)
        t = report * problem.report_every
        exact, _ = exact_solution(problem, t)
        err = float(np.max(np.abs(w - exact)))
        if err > BLOWUP:
            raise DivergenceError(f"error exceeded {BLOWUP:g} at t={t:.6g}", t)
        times.append(t)
        errors.append(err)
        if energy is not None:
            energy.append(discrete_energy(problem, w, v, mats))
    meta = {
        "steps": step,
        "stable_dt": limit,
        "half_bandwidth": problem.kernel.half_bandwidth,
        "sigma_over_delta": problem.kernel.ratio,
    }
    return ErrorTrace(
        np.array(times),
        np.array(errors),
        dt,
        None if energy is None else np.array(energy),
        FieldSamples(problem.grid, w),
        meta,
    )
