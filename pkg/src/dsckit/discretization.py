"""
Generalized finite differences built from DSC kernels.

A derivative of order ``q`` at node ``x_k`` is approximated by the
translation-invariant sum

    f^(q)(x_k) ~ sum_{j=-M..M} c_j f(x_{k+j}),   c_j = delta^(q)(-j Delta).

Near an edge the stencil reaches fictitious nodes outside the grid. Their
values are tied to interior values through

    f(x_{-i}) = a_i f(x_i) + (1 - a_i) f(x_0),

and the fictitious columns are folded back onto interior columns. Periodic
axes fold by index wraparound instead.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ArgumentError,
    DegenerateBoundaryError,
    DomainError,
    ParameterDomainError,
    UnsupportedBoundaryError,
    UnsupportedOrderError,
)
from .kernels import MAX_ORDER, KernelParams, eval_derivative

__all__ = [
    "Grid",
    "FieldSamples",
    "WeightTable",
    "BoundaryKind",
    "BoundarySpec",
    "DiffMatrix",
    "build_weights",
    "interpolate",
    "boundary_coeffs",
    "extension_matrix",
    "build_diff_matrix",
    "apply_derivative",
    "PERIODIC",
    "SIMPLY_SUPPORTED",
]


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform tensor grid with an optional interior mask.

    ``counts`` are node counts per axis, including edge nodes.
    """

    origin: tuple
    spacing: tuple
    counts: tuple
    mask: np.ndarray = None

    def __post_init__(self):
        origin = tuple(float(v) for v in np.atleast_1d(self.origin))
        spacing = tuple(float(v) for v in np.atleast_1d(self.spacing))
        counts = tuple(int(v) for v in np.atleast_1d(self.counts))
        if not (len(origin) == len(spacing) == len(counts)) or not 1 <= len(counts) <= 3:
            raise ParameterDomainError("origin, spacing and counts need 1..3 matching axes")
        if any(h <= 0 for h in spacing):
            raise ParameterDomainError(f"spacing must be positive, got {spacing}")
        if any(n < 2 for n in counts):
            raise ParameterDomainError(f"counts must be >= 2, got {counts}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "counts", counts)
        if self.mask is not None:
            mask = np.asarray(self.mask, dtype=bool)
            if mask.shape != counts:
                raise ParameterDomainError(f"mask shape {mask.shape} != counts {counts}")
            if not mask.any():
                raise ParameterDomainError("mask marks no interior point")
            mask.setflags(write=False)
            object.__setattr__(self, "mask", mask)

    @classmethod
    def uniform(cls, lo, hi, n, dims=1, periodic=False, mask=None):
        """``n`` nodes per axis on ``[lo, hi]`` (``[lo, hi)`` when periodic)."""
        h = (hi - lo) / (n if periodic else n - 1)
        return cls((lo,) * dims, (h,) * dims, (n,) * dims, mask)

    @property
    def dims(self):
        return len(self.counts)

    @property
    def shape(self):
        return self.counts

    def nodes(self, axis=0):
        return self.origin[axis] + self.spacing[axis] * np.arange(self.counts[axis])

    def mesh(self):
        return np.meshgrid(*(self.nodes(a) for a in range(self.dims)), indexing="ij")


@dataclass(frozen=True, eq=False)
class FieldSamples:
    """Real samples of a field on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise ParameterDomainError(
                f"values shape {values.shape} does not match grid {self.grid.shape}"
            )
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class WeightTable:
    """The ``2M+1`` weights ``c_j = delta^(q)(-j Delta)``, ``j = -M..M``."""

    order: int
    half_bandwidth: int
    weights: np.ndarray
    params: KernelParams

    @property
    def offsets(self):
        return np.arange(-self.half_bandwidth, self.half_bandwidth + 1)

    def __getitem__(self, j):
        return self.weights[j + self.half_bandwidth]

    def __len__(self):
        return len(self.weights)

    def rows(self):
        return list(zip(self.offsets.tolist(), self.weights.tolist()))


def build_weights(params, q, half_bandwidth=None):
    """Weight table of derivative order ``q`` for ``params``."""
    if int(q) != q or not 0 <= q <= MAX_ORDER:
        raise UnsupportedOrderError(f"derivative order must be 0..{MAX_ORDER}, got {q}")
    m = params.half_bandwidth if half_bandwidth is None else int(half_bandwidth)
    # evaluate offsets 0..M*delta once and mirror, so parity holds bit for bit
    half = np.atleast_1d(np.asarray(eval_derivative(params, int(q), np.arange(m + 1) * params.delta), dtype=float))
    w = np.concatenate([half[::-1], (-1) ** int(q) * half[1:]])
    w.setflags(write=False)
    return WeightTable(int(q), m, w, params)


# -- boundaries ---------------------------------------------------------------


class BoundaryKind(enum.Enum):
    PERIODIC = "periodic"
    CLAMPED = "clamped"
    SIMPLY_SUPPORTED = "simply-supported"
    TRANSVERSELY_SUPPORTED = "transversely-supported"
    GENERAL = "general"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {
            "symmetric": cls.CLAMPED,
            "antisymmetric": cls.SIMPLY_SUPPORTED,
            "anti-symmetric": cls.SIMPLY_SUPPORTED,
            "dirichlet": cls.SIMPLY_SUPPORTED,
            "transverse": cls.TRANSVERSELY_SUPPORTED,
        }
        if key in aliases:
            return aliases[key]
        for member in cls:
            if member.value == key:
                return member
        raise ParameterDomainError(f"unknown boundary kind {name!r}")


@dataclass(frozen=True)
class BoundarySpec:
    """Condition at one edge.

    ``k1`` is the coefficient of ``f'`` for a transversely supported edge
    (``f = 0``, ``f'' + k1 f' = 0``). ``k`` holds ``K_0..K_N`` of a general
    condition ``f = 0``, ``sum_{n>=1} K_n f^(n) = 0``; ``K_0`` must be zero
    since ``f(x_0) = 0`` is imposed separately. Derivatives are taken with
    respect to the axis coordinate at both edges.
    """

    kind: BoundaryKind
    k1: float = 0.0
    k: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "kind", BoundaryKind.parse(self.kind))
        object.__setattr__(self, "k", tuple(float(v) for v in self.k))
        if self.kind is BoundaryKind.GENERAL:
            if len(self.k) < 2:
                raise ParameterDomainError("general boundary needs K_0..K_N with N >= 1")
            if len(self.k) - 1 > MAX_ORDER:
                raise UnsupportedOrderError(f"general boundary order above {MAX_ORDER}")
            if self.k[0] != 0.0:
                raise UnsupportedBoundaryError(
                    "general boundary supports only f(x_0) = 0 plus a derivative "
                    "condition; K_0 must be 0"
                )
            if not any(self.k[1:]):
                raise ParameterDomainError("general boundary needs a nonzero K_n, n >= 1")

    @property
    def periodic(self):
        return self.kind is BoundaryKind.PERIODIC

    def derivative_coefficients(self):
        """``{n: K_n}`` for the derivative part of the condition."""
        if self.kind is BoundaryKind.CLAMPED:
            return {1: 1.0}
        if self.kind is BoundaryKind.SIMPLY_SUPPORTED:
            return {2: 1.0}
        if self.kind is BoundaryKind.TRANSVERSELY_SUPPORTED:
            return {1: self.k1, 2: 1.0}
        if self.kind is BoundaryKind.GENERAL:
            return {n: v for n, v in enumerate(self.k) if n >= 1 and v != 0.0}
        return {}


PERIODIC = BoundarySpec(BoundaryKind.PERIODIC)
SIMPLY_SUPPORTED = BoundarySpec(BoundaryKind.SIMPLY_SUPPORTED)


def boundary_coeffs(spec, tables, side="left", half_bandwidth=None):
    """Extension coefficients ``a_1..a_M`` for one edge.

    Parameters
    ----------
    spec : BoundarySpec
    tables : mapping of int to WeightTable
        Weight tables keyed by derivative order; must contain every order
        the condition involves. Unused for clamped and simply supported.
    side : {"left", "right"}
    half_bandwidth : int, optional
        Number of coefficients; defaults to the tables' half bandwidth.

    Returns
    -------
    numpy.ndarray
    """
    if side not in ("left", "right"):
        raise ParameterDomainError(f"side must be 'left' or 'right', got {side!r}")
    if spec.periodic:
        raise ParameterDomainError("periodic edges have no extension coefficients")
    if half_bandwidth is None:
        half_bandwidth = next(iter(tables.values())).half_bandwidth
    m = int(half_bandwidth)
    if spec.kind is BoundaryKind.CLAMPED:
        return np.ones(m)
    if spec.kind is BoundaryKind.SIMPLY_SUPPORTED:
        return -np.ones(m)
    kn = spec.derivative_coefficients()
    missing = [n for n in kn if n not in tables]
    if missing:
        raise ParameterDomainError(f"missing weight tables for orders {missing}")
    i = np.arange(1, m + 1)
    # C_i^n = delta^(n)(x_0 - x_i) is the table entry at offset +i
    same = sum(v * np.asarray([tables[n][ii] for ii in i]) for n, v in kn.items())
    alt = sum((-1) ** n * v * np.asarray([tables[n][ii] for ii in i]) for n, v in kn.items())
    scale = sum(np.abs(v * np.asarray([tables[n][ii] for ii in i])) for n, v in kn.items())
    # left: sum_n K_n C_i^n (1 + (-1)^n a_i) = 0; right edge mirrors it
    num, den = (-same, alt) if side == "left" else (-alt, same)
    if np.any(np.abs(den) < 1e-14 * np.maximum(scale, np.finfo(float).tiny)):
        raise DegenerateBoundaryError(
            f"{spec.kind.value} boundary: vanishing denominator in a_i on the {side} edge"
        )
    return num / den


def _edge_pair(boundary):
    if isinstance(boundary, BoundarySpec):
        return boundary, boundary
    left, right = boundary
    return left, right


def _coefficients_for(spec, params, side):
    m = params.half_bandwidth
    orders = spec.derivative_coefficients()
    tables = {n: build_weights(params, n) for n in orders} if orders else {}
    if spec.kind in (BoundaryKind.CLAMPED, BoundaryKind.SIMPLY_SUPPORTED):
        return boundary_coeffs(spec, {0: None}, side, m)
    return boundary_coeffs(spec, tables, side, m)


def extension_matrix(n, half_bandwidth, left=None, right=None, periodic=False):
    """Map ``n`` node values to the ``n + 2M`` values at nodes ``-M..n-1+M``.

    ``left`` and ``right`` are the coefficient arrays ``a_i``; fictitious
    nodes further than one reflection away are resolved recursively.
    """
    m = int(half_bandwidth)
    ext = np.zeros((n + 2 * m, n))
    if periodic:
        for row, idx in enumerate(range(-m, n + m)):
            ext[row, idx % n] = 1.0
        return ext
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)

    def resolve(idx, weight, out):
        if 0 <= idx <= n - 1:
            out[idx] += weight
            return
        if idx < 0:
            i, a, edge, mirror = -idx, left, 0, -idx
        else:
            i, a, edge = idx - (n - 1), right, n - 1
            mirror = n - 1 - i
        if i > len(a):
            raise ParameterDomainError(
                f"fictitious node {idx} lies beyond the {len(a)} extension coefficients"
            )
        ai = a[i - 1]
        out[edge] += weight * (1.0 - ai)
        resolve(mirror, weight * ai, out)

    for row, idx in enumerate(range(-m, n + m)):
        resolve(idx, 1.0, ext[row])
    return ext


@dataclass(frozen=True, eq=False)
class DiffMatrix:
    """Folded DSC differentiation matrix along one axis.

    Stored banded as ``band[k, j + M]`` (coefficient of column ``k + j``,
    modulo ``size`` when periodic) unless ``2M + 1 >= size``, in which case
    the full matrix is kept in ``full``.
    """

    size: int
    half_bandwidth: int
    order: int
    axis: int
    boundary: tuple
    periodic: bool
    band: np.ndarray = None
    full: np.ndarray = None

    @property
    def is_dense(self):
        return self.full is not None

    def dense(self):
        if self.full is not None:
            return self.full.copy()
        n, m = self.size, self.half_bandwidth
        out = np.zeros((n, n))
        for k in range(n):
            for j in range(-m, m + 1):
                col = k + j
                if self.periodic:
                    out[k, col % n] += self.band[k, j + m]
                elif 0 <= col < n:
                    out[k, col] += self.band[k, j + m]
        return out

    def interior(self):
        """Block acting on nodes ``1..size-2`` (edge unknowns eliminated)."""
        return self.dense()[1:-1, 1:-1]

    def edge_columns(self):
        """Interior rows of the two edge columns, for moving known edge values."""
        d = self.dense()
        return d[1:-1, 0], d[1:-1, -1]

    def entries(self):
        """Nonzero ``(row, col, coefficient)`` triples, row-major."""
        d = self.dense()
        rows, cols = np.nonzero(d)
        return [(int(r), int(c), float(d[r, c])) for r, c in zip(rows, cols)]

    def apply(self, values, axis=None):
        return apply_derivative(values, self.axis if axis is None else axis, self)


def build_diff_matrix(grid, axis, table, boundary):
    """Differentiation matrix for one axis of ``grid``.

    Parameters
    ----------
    grid : Grid or int
        Grid (or bare node count) whose ``axis`` is differentiated.
    axis : int
    table : WeightTable
    boundary : BoundarySpec or (BoundarySpec, BoundarySpec)
        Edge conditions; periodic must be set on both edges.

    Returns
    -------
    DiffMatrix
    """
    if isinstance(grid, Grid):
        n = grid.counts[axis]
        h = grid.spacing[axis]
        if not np.isclose(h, table.params.delta, rtol=1e-12, atol=0.0):
            raise ParameterDomainError(
                f"grid spacing {h} differs from kernel delta {table.params.delta}"
            )
    else:
        n = int(grid)
    if n < 2:
        raise ParameterDomainError(f"need at least 2 nodes, got {n}")
    left, right = _edge_pair(boundary)
    if left.periodic != right.periodic:
        raise ParameterDomainError("periodic boundaries must be set on both edges")
    periodic = left.periodic
    m = table.half_bandwidth
    w = np.asarray(table.weights)
    if periodic:
        ext = extension_matrix(n, m, periodic=True)
    else:
        params = table.params
        if params.half_bandwidth != m:
            params = KernelParams(params.family, params.delta, params.sigma, m, params.order)
        ext = extension_matrix(
            n, m, _coefficients_for(left, params, "left"), _coefficients_for(right, params, "right")
        )
    dense = 2 * m + 1 >= n
    if dense:
        full = np.zeros((n, n))
        for k in range(n):
            full[k] = w @ ext[k : k + 2 * m + 1]
        full.setflags(write=False)
        return DiffMatrix(n, m, table.order, axis, (left, right), periodic, full=full)
    band = np.empty((n, 2 * m + 1))
    if periodic:
        band[:] = w
    else:
        for k in range(n):
            row = w @ ext[k : k + 2 * m + 1]
            cols = np.arange(k - m, k + m + 1)
            inside = (cols >= 0) & (cols < n)
            band[k] = 0.0
            band[k, inside] = row[cols[inside]]
            outside = np.ones(n, dtype=bool)
            outside[cols[inside]] = False
            if np.any(row[outside] != 0.0):  # pragma: no cover - guarded by dense switch
                raise ParameterDomainError("folded stencil escaped its band")
    band.setflags(write=False)
    return DiffMatrix(n, m, table.order, axis, (left, right), periodic, band=band)


def apply_derivative(samples, axis, matrix):
    """Apply ``matrix`` along ``axis`` of every 1-D line of the field.

    Accepts a :class:`FieldSamples` or a bare array and returns the same kind.
    """
    wrapped = isinstance(samples, FieldSamples)
    values = samples.values if wrapped else np.asarray(samples, dtype=float)
    if values.ndim == 0 or not -values.ndim <= axis < values.ndim:
        raise ArgumentError(f"axis {axis} out of range for {values.ndim}-d field")
    if values.shape[axis] != matrix.size:
        raise ArgumentError(
            f"axis {axis} has {values.shape[axis]} points, matrix expects {matrix.size}"
        )
    if matrix.full is not None:
        out = np.moveaxis(np.tensordot(matrix.full, values, axes=(1, axis)), 0, axis)
        return FieldSamples(samples.grid, out) if wrapped else out
    v = np.moveaxis(values, axis, -1)
    n, m = matrix.size, matrix.half_bandwidth
    if matrix.periodic:
        out = np.zeros_like(v)
        for j in range(-m, m + 1):
            out += matrix.band[0, j + m] * np.roll(v, -j, axis=-1)
    else:
        pad = np.zeros(v.shape[:-1] + (n + 2 * m,))
        pad[..., m : m + n] = v
        out = np.zeros_like(v)
        for j in range(-m, m + 1):
            out += matrix.band[:, j + m] * pad[..., m + j : m + j + n]
    out = np.moveaxis(out, -1, axis)
    if wrapped:
        return FieldSamples(samples.grid, out)
    return out


def interpolate(samples, params, x, boundary=PERIODIC, origin=0.0):
    """DSC interpolant of 1-D samples at ``x``.

    Sums the kernel over the ``2M+1`` nodes nearest to each point, supplying
    values beyond the edges through the boundary extension.

    Parameters
    ----------
    samples : array_like or FieldSamples
        Values on the uniform grid ``origin + k * params.delta``.
    params : KernelParams
    x : float or array_like
    boundary : BoundarySpec or pair
    origin : float
        Coordinate of the first node (ignored for FieldSamples).
    """
    if isinstance(samples, FieldSamples):
        origin = samples.grid.origin[0]
        f = samples.values
    else:
        f = np.asarray(samples, dtype=float)
    if f.ndim != 1:
        raise ParameterDomainError("interpolate expects 1-D samples")
    n = f.size
    h = params.delta
    m = params.half_bandwidth
    left, right = _edge_pair(boundary)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    t = (xs - origin) / h
    if left.periodic:
        span = n
        if np.any((t < -1e-12) | (t > span + 1e-12)):
            raise DomainError(f"x outside the periodic hull [{origin}, {origin + n * h}]")
        ext = extension_matrix(n, m, periodic=True)
    else:
        if np.any((t < -1e-12) | (t > n - 1 + 1e-12)):
            raise DomainError(f"x outside the grid hull [{origin}, {origin + (n - 1) * h}]")
        ext = extension_matrix(
            n, m, _coefficients_for(left, params, "left"), _coefficients_for(right, params, "right")
        )
    f_ext = ext @ f  # nodes -M..n-1+M
    out = np.empty(xs.shape)
    for idx, (xv, tv) in enumerate(zip(xs, t)):
        k0 = int(np.round(tv))
        if left.periodic and k0 >= n:
            k0 -= n
            xv -= n * h
        if k0 == tv:
            out[idx] = f_ext[k0 + m]
            continue
        ks = np.arange(k0 - m, k0 + m + 1)
        vals = _ext_values(f, f_ext, ks, n, m, left.periodic)
        out[idx] = np.dot(eval_derivative(params, 0, xv - origin - ks * h), vals)
    if np.ndim(x) == 0:
        return float(out[0])
    return out


def _ext_values(f, f_ext, ks, n, m, periodic):
    if periodic:
        return f[np.mod(ks, n)]
    return f_ext[ks + m]
