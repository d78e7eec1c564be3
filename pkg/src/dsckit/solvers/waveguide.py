"""
TM waveguide eigenmodes: ``E_xx + E_yy + k^2 E = 0`` with ``E = 0`` on walls.

The transverse Laplacian is assembled on interior nodes from 1-D DSC
second-derivative matrices whose edge stencils use the antisymmetric
(simply supported) fold, then diagonalized densely.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy import ndimage

from ..discretization import SIMPLY_SUPPORTED, Grid, build_diff_matrix, build_weights
from ..errors import GeometryError, NumericFailure, ParameterDomainError
from ..kernels import KernelFamily, KernelParams
from .reports import EigenReport

__all__ = [
    "WaveguideProblem",
    "solve_waveguide",
    "square_spectrum",
    "shape_mask",
    "laplacian_operator",
]

SIDE = 10.0 * math.pi
IMAG_TOL = 1e-8


def shape_mask(shape, n=50):
    """Interior mask of the default T or E cross section on ``n x n`` nodes.

    Index order is ``[ix, iy]`` with ``y`` pointing up. T: the top 40 %
    band plus a centred stem over the middle 34 % of columns. E: a spine
    over the left 20 % of columns plus three 20 %-high arms at the bottom,
    middle and top. Nodes on the outer frame are always walls.
    """
    t = np.linspace(0.0, 1.0, n)
    x, y = np.meshgrid(t, t, indexing="ij")
    kind = str(shape).upper()
    if kind == "T":
        mask = (y >= 0.6) | (np.abs(x - 0.5) <= 0.17)
    elif kind == "E":
        arms = (y <= 0.2) | ((y >= 0.4) & (y <= 0.6)) | (y >= 0.8)
        mask = (x <= 0.2) | arms
    elif kind == "SQUARE":
        mask = np.ones((n, n), dtype=bool)
    else:
        raise ParameterDomainError(f"unknown waveguide shape {shape!r}")
    mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = False
    return mask


@dataclass(frozen=True, eq=False)
class WaveguideProblem:
    """Waveguide cross section on ``[0, 10 pi]^2``.

    ``grid`` includes the wall nodes. Without a mask every non-edge node is
    an unknown; with a mask the unknowns are the masked nodes and every
    unmasked node is a wall. ``omega`` and ``eps_nu`` only feed the reported
    propagation constants ``alpha = sqrt(omega^2 eps_nu - k^2)``.
    """

    grid: Grid
    kernel: KernelParams
    n_modes: int = 20
    omega: float = None
    eps_nu: float = 1.0
    keep_modes: bool = False

    def __post_init__(self):
        g = self.grid
        if g.dims != 2 or g.counts[0] != g.counts[1] or not np.isclose(*g.spacing):
            raise ParameterDomainError("waveguide grid must be square and uniform")
        if self.n_modes < 1:
            raise ParameterDomainError(f"n_modes must be >= 1, got {self.n_modes}")

    @classmethod
    def square(cls, n, half_bandwidth=None, ratio=3.2, family=KernelFamily.SHANNON, **kw):
        """``n`` intervals per side, so ``(n-1)^2`` unknowns; M defaults to ``n``."""
        grid = Grid.uniform(0.0, SIDE, n + 1, dims=2)
        m = n if half_bandwidth is None else half_bandwidth
        kernel = KernelParams.from_ratio(family, grid.spacing[0], ratio, m)
        return cls(grid, kernel, **kw)

    @classmethod
    def shaped(cls, shape, n=50, half_bandwidth=None, ratio=4.8, family=KernelFamily.SHANNON, **kw):
        """T or E cross section on ``n`` nodes per side (default mask)."""
        grid = Grid.uniform(0.0, SIDE, n, dims=2, mask=shape_mask(shape, n))
        m = n if half_bandwidth is None else half_bandwidth
        kernel = KernelParams.from_ratio(family, grid.spacing[0], ratio, m)
        return cls(grid, kernel, **kw)

    @property
    def unknowns(self):
        """Boolean field of nodes carrying an unknown."""
        if self.grid.mask is not None:
            return self.grid.mask
        inner = np.zeros(self.grid.shape, dtype=bool)
        inner[1:-1, 1:-1] = True
        return inner


def square_spectrum(count, side=SIDE):
    """First ``count`` values of ``(m^2 + n^2) (pi/side)^2``, m, n >= 1."""
    k = int(math.isqrt(count)) + 2
    while True:
        m, n = np.meshgrid(np.arange(1, k + 1), np.arange(1, k + 1))
        vals = np.sort(((m**2 + n**2) * (math.pi / side) ** 2).ravel())
        # every value below (k+1)^2 scale is already present
        if vals[count - 1] < ((k + 1) ** 2 + 1) * (math.pi / side) ** 2:
            return vals[:count]
        k *= 2


def _interior_second_derivative(n_nodes, kernel):
    """``d^2/dx^2`` on the ``n_nodes - 2`` inner nodes of a wall-bounded line."""
    table = build_weights(kernel, 2)
    return build_diff_matrix(n_nodes, 0, table, SIMPLY_SUPPORTED).interior()


def _runs(line):
    """``(start, stop)`` index pairs of consecutive True entries."""
    padded = np.concatenate(([False], line, [False])).astype(np.int8)
    d = np.diff(padded)
    return list(zip(np.flatnonzero(d == 1), np.flatnonzero(d == -1)))


def laplacian_operator(problem):
    """Dense discrete Laplacian on the unknowns, in row-major node order."""
    unknowns = problem.unknowns
    if problem.grid.mask is None:
        n = problem.grid.counts[0]
        d = _interior_second_derivative(n, problem.kernel)
        eye = np.eye(n - 2)
        return np.kron(d, eye) + np.kron(eye, d)
    index = -np.ones(unknowns.shape, dtype=int)
    index[unknowns] = np.arange(int(unknowns.sum()))
    size = int(unknowns.sum())
    op = np.zeros((size, size))
    cache = {}
    for axis in (0, 1):
        lines = np.moveaxis(unknowns, axis, 0)
        idx_lines = np.moveaxis(index, axis, 0)
        for other in range(lines.shape[1]):
            for start, stop in _runs(lines[:, other]):
                length = stop - start
                if length not in cache:
                    # walls sit on the masked-out nodes bracketing the run
                    cache[length] = _interior_second_derivative(length + 2, problem.kernel)
                ids = idx_lines[start:stop, other]
                op[np.ix_(ids, ids)] += cache[length]
    return op


def _check_geometry(problem):
    unknowns = problem.unknowns
    if problem.grid.mask is not None:
        m = problem.grid.mask
        if m[0, :].any() or m[-1, :].any() or m[:, 0].any() or m[:, -1].any():
            raise GeometryError("mask must leave the outer frame of nodes as walls")
    _, count = ndimage.label(unknowns)
    if count != 1:
        raise GeometryError(f"interior splits into {count} disconnected regions")
    if problem.n_modes > int(unknowns.sum()):
        raise ParameterDomainError(
            f"n_modes={problem.n_modes} exceeds the {int(unknowns.sum())} unknowns"
        )


def _polish(op, values, left, right):
    """Two-sided Rayleigh quotients ``u^T A v / u^T v``.

    The QR iteration leaves an absolute error near ``eps * ||A||`` on every
    eigenvalue; the quotient built from the computed vectors is accurate to
    second order in their error and removes most of that floor.
    """
    out = values.copy()
    av = op @ right
    for i in range(values.size):
        u, v = left[:, i], right[:, i]
        den = u @ v
        if abs(den) > 1e-8 * np.linalg.norm(u) * np.linalg.norm(v):
            out[i] = (u @ av[:, i]) / den
    residual = np.linalg.norm(av - right * out, axis=0) / np.linalg.norm(right, axis=0)
    return out, float(np.max(residual) / np.abs(op).sum(axis=1).max())


def solve_waveguide(problem):
    """Smallest ``n_modes`` eigenvalues ``k^2`` of the TM problem.

    Returns
    -------
    EigenReport
        For the unmasked square, errors are taken against
        ``(m^2 + n^2) / 100``.
    """
    _check_geometry(problem)
    op = -laplacian_operator(problem)
    try:
        vals, left, right = scipy.linalg.eig(op, left=True, right=True)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NumericFailure(f"eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise NumericFailure("eigensolver returned non-finite eigenvalues")
    order = np.argsort(vals.real, kind="stable")[: problem.n_modes]
    picked = vals[order]
    scale = np.maximum(np.abs(picked), np.finfo(float).tiny)
    residue = float(np.max(np.abs(picked.imag) / scale))
    if residue > IMAG_TOL:
        raise NumericFailure(f"complex eigenvalues: relative imaginary part {residue:.3g}")
    eigenvalues, residual = _polish(op, picked.real, left[:, order].real, right[:, order].real)
    # polishing can swap members of a degenerate pair by an ulp
    resort = np.argsort(eigenvalues, kind="stable")
    eigenvalues, order = eigenvalues[resort], order[resort]
    analytic = errors = None
    if problem.grid.mask is None:
        analytic = square_spectrum(problem.n_modes)
        errors = np.abs(eigenvalues - analytic)
    modes = None
    if problem.keep_modes:
        unknowns = problem.unknowns
        modes = np.zeros((problem.n_modes,) + problem.grid.shape)
        for i in range(problem.n_modes):
            v = right[:, order[i]].real
            modes[i][unknowns] = v / np.max(np.abs(v))
    meta = {
        "unknowns": int(problem.unknowns.sum()),
        "half_bandwidth": problem.kernel.half_bandwidth,
        "sigma_over_delta": problem.kernel.ratio,
        "family": problem.kernel.family.value,
        "relative_residual": residual,
    }
    if problem.omega is not None:
        beta2 = problem.omega**2 * problem.eps_nu - eigenvalues
        meta["propagation_constant"] = np.where(beta2 >= 0, np.sqrt(np.abs(beta2)), np.nan)
    return EigenReport(eigenvalues, analytic, errors, residue, modes, meta)
