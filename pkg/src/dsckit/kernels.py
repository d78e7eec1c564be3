"""
Regularized DSC delta kernels.

Every kernel is a band-limited interpolating core ``g(x)`` multiplied by the
Gaussian regularizer ``exp(-x**2 / (2 sigma**2))``. Derivatives up to fourth
order are evaluated in closed form: the regularized Shannon kernel uses the
explicit expressions written out term by term, the other families go through
the Leibniz rule with the Gaussian derivatives expressed as Hermite multiples.

Offsets are measured in the same length unit as the grid spacing ``delta``.
All functions accept scalars or numpy arrays and broadcast elementwise.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ParameterDomainError,
    UnderResolvedError,
    UnsupportedFamilyError,
    UnsupportedOrderError,
)

__all__ = [
    "KernelFamily",
    "KernelParams",
    "ParameterAdvice",
    "eval_kernel",
    "eval_derivative",
    "normalization",
    "advise_parameters",
    "eval_shannon_wavelet",
    "SINGULAR_TOL",
    "MAX_ORDER",
]

#: offsets with ``|x| < SINGULAR_TOL * delta`` are evaluated by their limits
SINGULAR_TOL = 1e-9
MAX_ORDER = 4
DEFAULT_ORDER = 50

# below this |u| the Taylor series replaces closed forms with 1/u**k terms
_SERIES_SWITCH = 1.5
_SERIES_TERMS = 32


class KernelFamily(enum.Enum):
    SHANNON = "shannon"
    DIRICHLET = "dirichlet"
    MODIFIED_DIRICHLET = "modified-dirichlet"
    LAGRANGE = "lagrange"
    POUSSIN = "poussin"

    @classmethod
    def parse(cls, name):
        """Look a family up by value or by its usual abbreviation."""
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {
            "rsk": cls.SHANNON,
            "rdk": cls.DIRICHLET,
            "rlk": cls.LAGRANGE,
            "modified": cls.MODIFIED_DIRICHLET,
            "mdk": cls.MODIFIED_DIRICHLET,
            "de-la-vallee-poussin": cls.POUSSIN,
            "vallee-poussin": cls.POUSSIN,
        }
        if key in aliases:
            return aliases[key]
        for member in cls:
            if member.value == key:
                return member
        raise ParameterDomainError(f"unknown kernel family {name!r}")

    @property
    def uses_order(self):
        return self in (
            KernelFamily.DIRICHLET,
            KernelFamily.MODIFIED_DIRICHLET,
            KernelFamily.LAGRANGE,
        )


@dataclass(frozen=True)
class KernelParams:
    """One DSC delta kernel.

    Parameters
    ----------
    family : KernelFamily
    delta : float
        Grid spacing.
    sigma : float
        Width of the Gaussian regularizer; ``math.inf`` switches it off.
    half_bandwidth : int
        Stencil half width ``M`` in grid points.
    order : int, optional
        Order ``L`` of the Dirichlet and Lagrange families (``L >= M``).
        Defaults to ``max(50, M)``; ignored by the other families.
    """

    family: KernelFamily
    delta: float
    sigma: float = math.inf
    half_bandwidth: int = 1
    order: int = None

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily.parse(self.family))
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ParameterDomainError(f"delta must be positive, got {self.delta}")
        if math.isnan(self.sigma) or self.sigma <= 0:
            raise ParameterDomainError(f"sigma must be positive or inf, got {self.sigma}")
        if int(self.half_bandwidth) != self.half_bandwidth or self.half_bandwidth < 1:
            raise ParameterDomainError(
                f"half_bandwidth must be an integer >= 1, got {self.half_bandwidth}"
            )
        object.__setattr__(self, "half_bandwidth", int(self.half_bandwidth))
        if self.family.uses_order:
            order = self.order
            if order is None:
                order = max(DEFAULT_ORDER, self.half_bandwidth)
            if int(order) != order or order < self.half_bandwidth:
                raise ParameterDomainError(
                    f"order L={order} must be an integer >= half_bandwidth "
                    f"M={self.half_bandwidth}"
                )
            object.__setattr__(self, "order", int(order))

    @classmethod
    def from_ratio(cls, family, delta, ratio, half_bandwidth, order=None):
        """Build parameters from ``r = sigma / delta`` instead of sigma."""
        return cls(family, delta, ratio * delta, half_bandwidth, order)

    @property
    def regularized(self):
        return math.isfinite(self.sigma)

    @property
    def ratio(self):
        """``sigma / delta`` (``inf`` when unregularized)."""
        return self.sigma / self.delta


@dataclass(frozen=True)
class ParameterAdvice:
    """Smallest ``r = sigma/delta`` and ``M`` reaching ``eta`` digits."""

    eta: float
    bandlimit: float
    r_min: float
    m_min: int
    delta: float = 1.0

    @property
    def sigma(self):
        return self.r_min * self.delta

    def kernel_params(self, family=KernelFamily.SHANNON, order=None):
        return KernelParams.from_ratio(family, self.delta, self.r_min, self.m_min, order)


# -- elementary pieces ------------------------------------------------------


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _trig_pi(t):
    """``sin(pi t)`` and ``cos(pi t)``, exact at integer and half-integer t."""
    t = np.asarray(t, dtype=float)
    r = t - 2.0 * np.round(0.5 * t)  # exact reduction into [-1, 1]
    s = np.sin(np.pi * r)
    c = np.cos(np.pi * r)
    whole = r == np.round(r)
    s = np.where(whole, 0.0, s)
    c = np.where(whole, np.where(np.abs(r) == 1.0, -1.0, 1.0), c)
    half = np.abs(r) == 0.5
    s = np.where(half, np.sign(r), s)
    c = np.where(half, 0.0, c)
    return s, c


def _sin_derivs(s, c):
    return (s, c, -s, -c)


def _cos_derivs(s, c):
    return (c, -s, -c, s)


def _even_series_derivs(coeffs, u, kmax):
    """Derivatives 0..kmax of ``sum_n coeffs[n] * u**(2n)``."""
    out = np.zeros((kmax + 1,) + u.shape)
    for k in range(kmax + 1):
        acc = np.zeros(u.shape)
        for n in range(len(coeffs) - 1, -1, -1):
            p = 2 * n
            if p < k:
                break
            acc = acc + coeffs[n] * (math.perm(p, k) * u ** (p - k))
        out[k] = acc
    return out


_SINC_SERIES = [(-1) ** n / math.factorial(2 * n + 1) for n in range(_SERIES_TERMS)]
# (cos u - cos 2u) / u**2
_POUSSIN_SERIES = [
    (-1) ** n * (4 ** (n + 1) - 1) / math.factorial(2 * n + 2) for n in range(_SERIES_TERMS)
]


def _sinc_derivs(u, kmax):
    """Derivatives of ``sin(u)/u`` in ``u``, rows 0..kmax."""
    out = np.empty((kmax + 1,) + u.shape)
    small = np.abs(u) < _SERIES_SWITCH
    if small.any():
        out[:, small] = _even_series_derivs(_SINC_SERIES, u[small], kmax)
    big = ~small
    if big.any():
        ub = u[big]
        s, c = np.sin(ub), np.cos(ub)
        sd = _sin_derivs(s, c)
        for k in range(kmax + 1):
            acc = np.zeros(ub.shape)
            for j in range(k + 1):
                inv = (-1) ** j * math.factorial(j) * ub ** (-1 - j)
                acc = acc + math.comb(k, j) * sd[(k - j) % 4] * inv
            out[k, big] = acc
    return out


def _poussin_core_derivs(u, kmax):
    """Derivatives of ``(cos u - cos 2u) / u**2`` in ``u``."""
    out = np.empty((kmax + 1,) + u.shape)
    small = np.abs(u) < _SERIES_SWITCH
    if small.any():
        out[:, small] = _even_series_derivs(_POUSSIN_SERIES, u[small], kmax)
    big = ~small
    if big.any():
        ub = u[big]
        c1 = _cos_derivs(np.sin(ub), np.cos(ub))
        c2 = _cos_derivs(np.sin(2 * ub), np.cos(2 * ub))
        for k in range(kmax + 1):
            acc = np.zeros(ub.shape)
            for j in range(k + 1):
                m = k - j
                num = c1[m % 4] - 2.0**m * c2[m % 4]
                inv = (-1) ** j * math.factorial(j + 1) * ub ** (-2 - j)
                acc = acc + math.comb(k, j) * num * inv
            out[k, big] = acc
    return out


def _cosine_sum_derivs(x, freqs, weights, scale, kmax, chunk=256):
    """Derivatives of ``scale * sum_k weights[k] cos(freqs[k] x)``."""
    out = np.zeros((kmax + 1,) + x.shape)
    flat = x.ravel()
    res = out.reshape(kmax + 1, -1)
    for start in range(0, flat.size, chunk):
        xs = flat[start : start + chunk]
        phase = np.outer(xs, freqs)
        s, c = np.sin(phase), np.cos(phase)
        cd = _cos_derivs(s, c)
        for k in range(kmax + 1):
            res[k, start : start + chunk] = scale * (cd[k % 4] @ (weights * freqs**k))
    return out


def _gaussian_derivs(x, sigma, kmax):
    """Rows ``d^n/dx^n exp(-x^2/2 sigma^2)`` for n = 0..kmax."""
    out = np.zeros((kmax + 1,) + x.shape)
    if not math.isfinite(sigma):
        out[0] = 1.0
        return out
    t = x / sigma
    g = np.exp(-0.5 * t * t)
    # probabilists' Hermite polynomials He_n(t)
    he = [np.ones_like(t), t]
    for n in range(1, kmax):
        he.append(t * he[n] - n * he[n - 1])
    for n in range(kmax + 1):
        out[n] = (-1.0 / sigma) ** n * he[n] * g
    return out


def _core_derivs(params, x, kmax):
    """Derivatives 0..kmax of the unregularized interpolating core."""
    fam = params.family
    delta = params.delta
    if fam is KernelFamily.SHANNON:
        a = math.pi / delta
        d = _sinc_derivs(a * x, kmax)
        return d * (a ** np.arange(kmax + 1)).reshape((-1,) + (1,) * x.ndim)
    if fam is KernelFamily.POUSSIN:
        c = 2.0 * math.pi / (3.0 * delta)
        d = _poussin_core_derivs(c * x, kmax)
        return (2.0 / 3.0) * d * (c ** np.arange(kmax + 1)).reshape((-1,) + (1,) * x.ndim)
    L = params.order
    b = math.pi / (delta * (2 * L + 1))
    k = np.arange(1, L + 1, dtype=float)
    if fam is KernelFamily.DIRICHLET:
        # sin((2L+1)y) / ((2L+1) sin y) = (1 + 2 sum_k cos 2ky) / (2L+1)
        freqs = np.concatenate(([0.0], 2.0 * k * b))
        weights = np.concatenate(([1.0], np.full(L, 2.0)))
        return _cosine_sum_derivs(x, freqs, weights, 1.0 / (2 * L + 1), kmax)
    if fam is KernelFamily.MODIFIED_DIRICHLET:
        # sin((2L+1)y) cos y / ((2L+1) sin y)
        #   = (2 sum_k cos (2k-1)y + cos (2L+1)y) / (2L+1)
        freqs = np.concatenate(((2.0 * k - 1.0) * b, [(2 * L + 1) * b]))
        weights = np.concatenate((np.full(L, 2.0), [1.0]))
        return _cosine_sum_derivs(x, freqs, weights, 1.0 / (2 * L + 1), kmax)
    if fam is KernelFamily.LAGRANGE:
        # prod_{i=1..L} (1 - x^2 / (i delta)^2), built factor by factor
        p = np.zeros((kmax + 1,) + x.shape)
        p[0] = 1.0
        for i in range(1, L + 1):
            h = (i * delta) ** 2
            f0 = 1.0 - x * x / h
            f1 = -2.0 * x / h
            f2 = -2.0 / h
            new = np.empty_like(p)
            for n in range(kmax + 1):
                acc = p[n] * f0
                if n >= 1:
                    acc = acc + n * p[n - 1] * f1
                if n >= 2:
                    acc = acc + math.comb(n, 2) * p[n - 2] * f2
                new[n] = acc
            p = new
        p[:, np.abs(x) > L * delta] = 0.0
        return p
    raise UnsupportedFamilyError(f"no core for {fam}")  # pragma: no cover


def _leibniz(params, x, q):
    core = _core_derivs(params, x, q)
    gauss = _gaussian_derivs(x, params.sigma, q)
    total = np.zeros(x.shape)
    for n in range(q + 1):
        total = total + math.comb(q, n) * core[q - n] * gauss[n]
    return total


# -- regularized Shannon, explicit expressions ------------------------------


def _shannon_limit(params, q):
    """Values of the regularized Shannon derivatives at zero offset."""
    a2 = (math.pi / params.delta) ** 2
    if q in (1, 3):
        return 0.0
    if not params.regularized:
        # sinc derivatives at the origin: 1, -a^2/3, a^4/5
        return {0: 1.0, 2: -a2 / 3.0, 4: a2 * a2 / 5.0}[q]
    s2 = params.sigma**2
    if q == 0:
        return 1.0
    if q == 2:
        return -(3.0 + a2 * s2) / (3.0 * s2)
    return (15.0 + 10.0 * a2 * s2 + a2 * a2 * s2 * s2) / (5.0 * s2 * s2)


def _shannon_explicit(params, x, q):
    """Closed-form derivative q of the regularized Shannon kernel, x != 0."""
    a = math.pi / params.delta
    s, c = _trig_pi(x / params.delta)
    if params.regularized:
        inv2 = 1.0 / params.sigma**2
        e = np.exp(-0.5 * x * x * inv2)
    else:
        inv2 = 0.0
        e = 1.0
    inv4, inv6, inv8 = inv2**2, inv2**3, inv2**4
    if q == 0:
        return s / (a * x) * e
    if q == 1:
        val = c / x - s / (a * x**2) - s * inv2 / a
    elif q == 2:
        val = (
            -a * s / x
            - 2 * c / x**2
            - 2 * c * inv2
            + 2 * s / (a * x**3)
            + s * inv2 / (a * x)
            + s * x * inv4 / a
        )
    elif q == 3:
        val = (
            -(a**2) * c / x
            + 3 * a * s / x**2
            + 3 * a * s * inv2
            + 6 * c / x**3
            + 3 * c * inv2 / x
            + 3 * x * c * inv4
            - 6 * s / (a * x**4)
            - 3 * s * inv2 / (a * x**2)
            - x**2 * s * inv6 / a
        )
    else:
        val = (
            4 * a**2 * c / x**2
            + a**3 * s / x
            + 4 * a**2 * c * inv2
            - 12 * a * s / x**3
            - 6 * a * s * inv2 / x
            - 6 * a * x * s * inv4
            - 24 * c / x**4
            - 12 * c * inv2 / x**2
            - 4 * x**2 * c * inv6
            + 24 * s / (a * x**5)
            + 12 * s * inv2 / (a * x**3)
            + 3 * s * inv4 / (a * x)
            - 2 * x * s * inv6 / a
            + x**3 * s * inv8 / a
        )
    return val * e


def _shannon(params, x, q):
    out = np.empty(x.shape)
    ax = np.abs(x)
    origin = ax < SINGULAR_TOL * params.delta
    out[origin] = _shannon_limit(params, q)
    far = ax * (math.pi / params.delta) >= _SERIES_SWITCH
    out[far] = _shannon_explicit(params, x[far], q)
    near = ~(origin | far)
    if near.any():
        out[near] = _leibniz(params, x[near], q)
    return out


# -- public operations -----------------------------------------------------


def _check_order(q):
    if int(q) != q or not 0 <= q <= MAX_ORDER:
        raise UnsupportedOrderError(f"derivative order must be 0..{MAX_ORDER}, got {q}")
    return int(q)


def _snap_grid_zeros(params, x, values):
    """Exact zeros of the q=0 kernel at nonzero grid offsets."""
    t = x / params.delta
    j = np.round(t)
    # a few ulps absorbs the rounding of (j * delta) / delta
    on_grid = (np.abs(t - j) <= 8.0 * np.finfo(float).eps * np.abs(j)) & (j != 0)
    if params.family in (KernelFamily.DIRICHLET, KernelFamily.MODIFIED_DIRICHLET):
        on_grid &= np.mod(j, 2 * params.order + 1) != 0
    return np.where(on_grid, 0.0, values)


def eval_derivative(params, q, offset):
    """Derivative of order ``q`` of the kernel at ``offset = x - x_k``.

    Parameters
    ----------
    params : KernelParams
    q : int
        Derivative order, 0 to 4.
    offset : float or array_like

    Returns
    -------
    float or numpy.ndarray
    """
    q = _check_order(q)
    x, scalar = _as_array(offset)
    if params.family is KernelFamily.SHANNON:
        out = _shannon(params, x, q)
    else:
        out = _leibniz(params, x, q)
    if q == 0:
        out = _snap_grid_zeros(params, x, out)
    return float(out) if scalar else out


def eval_kernel(params, offset):
    """Kernel value at ``offset = x - x_k``; equals 1 at 0 and 0 at other nodes."""
    return eval_derivative(params, 0, offset)


def normalization(params):
    """Integral of the regularized Shannon kernel over the real line.

    Equals ``erf(pi sigma / (sqrt(2) delta))`` and is strictly below one for
    finite sigma.
    """
    if params.family is not KernelFamily.SHANNON:
        raise UnsupportedFamilyError(
            f"closed-form normalization only exists for shannon, not {params.family.value}"
        )
    if not params.regularized:
        return 1.0
    return math.erf(math.pi * params.ratio / math.sqrt(2.0))


def advise_parameters(eta, bandlimit, delta, ratio=None):
    """Smallest ``r = sigma/delta`` and half bandwidth ``M`` for ``eta`` digits.

    Both ``r (pi - B delta) > sqrt(4.61 eta)`` and ``M / r > sqrt(4.61 eta)``
    hold strictly for the returned values. ``r`` is rounded up to three
    decimals and ``M`` to the next integer. Passing ``ratio`` fixes ``r`` and
    only ``M`` is searched.
    """
    if not eta > 0:
        raise ParameterDomainError(f"eta must be positive, got {eta}")
    if not delta > 0:
        raise ParameterDomainError(f"delta must be positive, got {delta}")
    if bandlimit < 0:
        raise ParameterDomainError(f"bandlimit must be >= 0, got {bandlimit}")
    gap = math.pi - bandlimit * delta
    if gap <= 0:
        raise UnderResolvedError(
            f"B*delta = {bandlimit * delta:.6g} >= pi: grid under-resolves the band"
        )
    bound = math.sqrt(4.61 * eta)
    if ratio is None:
        r = math.ceil(bound / gap * 1000.0) / 1000.0
        while not r * gap > bound:
            r = round(r + 0.001, 3)
        r = max(r, 0.001)
    else:
        r = float(ratio)
        if not r * gap > bound:
            raise ParameterDomainError(
                f"r={r} violates r(pi - B delta) > sqrt(4.61 eta) = {bound:.6g}"
            )
    m = max(1, math.floor(r * bound) + 1)
    return ParameterAdvice(eta, bandlimit, r, m, delta)


def eval_shannon_wavelet(offset):
    """Shannon mother wavelet ``(sin 2 pi x - sin pi x) / (pi x)``."""
    x, scalar = _as_array(offset)
    s2, _ = _trig_pi(2.0 * x)
    s1, _ = _trig_pi(x)
    small = np.abs(x) < SINGULAR_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(small, 1.0, (s2 - s1) / (np.pi * np.where(small, 1.0, x)))
    return float(out) if scalar else out
