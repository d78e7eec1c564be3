"""
Classical delta sequences and numerical checks of their defining properties.

Each kind is a one-parameter family ``delta_alpha`` whose integral against a
test function tends to the function's value at zero as ``alpha`` approaches
its limit ``alpha_0``. Positive-type kinds are nonnegative with unit mass;
Dirichlet-type kinds oscillate.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import ArgumentError, ParameterDomainError

__all__ = [
    "DeltaSequenceKind",
    "Quadrature",
    "PositivityReport",
    "IMPULSE",
    "GAUSS",
    "LORENTZ",
    "POISSON",
    "FEJER_DISCRETE",
    "FEJER_CONTINUOUS",
    "DIRICHLET",
    "MODIFIED_DIRICHLET",
    "KINDS",
    "gauss_density",
    "lorentz_density",
    "eval_delta",
    "support",
    "tail_mass",
    "convergence_probe",
    "positivity_and_mass",
]

_TAGS = (
    "impulse",
    "gauss",
    "lorentz",
    "landau",
    "poisson",
    "fejer-discrete",
    "fejer-continuous",
    "dirichlet",
    "modified-dirichlet",
    "poussin",
    "dilated",
)

_POSITIVE = {
    "impulse",
    "gauss",
    "lorentz",
    "landau",
    "poisson",
    "fejer-discrete",
    "fejer-continuous",
    "dilated",
}


def gauss_density(x):
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def lorentz_density(x):
    return 1.0 / (math.pi * (1.0 + x * x))


@dataclass(frozen=True)
class DeltaSequenceKind:
    """A delta-sequence family.

    ``order`` is the Lorentz exponent ``n``, ``support_halfwidth`` the
    Landau support ``a``, ``p`` the de la Vallee Poussin averaging length and
    ``density`` the unit-mass density dilated by the ``dilated`` kind.
    """

    tag: str
    order: int = 1
    support_halfwidth: float = 1.0
    p: int = 0
    density: object = None

    def __post_init__(self):
        tag = str(self.tag).lower().replace("_", "-")
        if tag not in _TAGS:
            raise ParameterDomainError(f"unknown delta sequence {self.tag!r}")
        object.__setattr__(self, "tag", tag)
        if tag == "lorentz" and (int(self.order) != self.order or self.order < 1):
            raise ParameterDomainError(f"Lorentz order must be an integer >= 1, got {self.order}")
        if tag == "landau" and not self.support_halfwidth > 0:
            raise ParameterDomainError(f"Landau support a must be > 0, got {self.support_halfwidth}")
        if tag == "poussin" and (int(self.p) != self.p or self.p < 0):
            raise ParameterDomainError(f"Poussin p must be an integer >= 0, got {self.p}")
        if tag == "dilated" and self.density is None:
            object.__setattr__(self, "density", gauss_density)

    @classmethod
    def lorentz(cls, n=1):
        return cls("lorentz", order=n)

    @classmethod
    def landau(cls, a=1.0):
        return cls("landau", support_halfwidth=a)

    @classmethod
    def poussin(cls, p):
        return cls("poussin", p=p)

    @classmethod
    def dilated(cls, density=gauss_density):
        return cls("dilated", density=density)

    @property
    def positive_type(self):
        if self.tag == "poussin":
            return None  # positive only when p == n
        return self.tag in _POSITIVE

    @property
    def alpha_limit(self):
        """Limit ``alpha_0`` of the sequence parameter."""
        if self.tag in ("gauss", "lorentz", "fejer-continuous", "dilated"):
            # fejer-continuous narrows as alpha grows
            return math.inf if self.tag == "fejer-continuous" else 0.0
        if self.tag == "poisson":
            return 1.0
        return math.inf


IMPULSE = DeltaSequenceKind("impulse")
GAUSS = DeltaSequenceKind("gauss")
LORENTZ = DeltaSequenceKind("lorentz")
POISSON = DeltaSequenceKind("poisson")
FEJER_DISCRETE = DeltaSequenceKind("fejer-discrete")
FEJER_CONTINUOUS = DeltaSequenceKind("fejer-continuous")
DIRICHLET = DeltaSequenceKind("dirichlet")
MODIFIED_DIRICHLET = DeltaSequenceKind("modified-dirichlet")

KINDS = {
    "impulse": IMPULSE,
    "gauss": GAUSS,
    "lorentz": LORENTZ,
    "landau": DeltaSequenceKind.landau(1.0),
    "poisson": POISSON,
    "fejer-discrete": FEJER_DISCRETE,
    "fejer-continuous": FEJER_CONTINUOUS,
    "dirichlet": DIRICHLET,
    "modified-dirichlet": MODIFIED_DIRICHLET,
    "poussin": DeltaSequenceKind.poussin(0),
    "dilated-gauss": DeltaSequenceKind.dilated(gauss_density),
    "dilated-lorentz": DeltaSequenceKind.dilated(lorentz_density),
}


def _integer(alpha, lo, what):
    if int(alpha) != alpha or alpha < lo:
        raise ParameterDomainError(f"{what} must be an integer >= {lo}, got {alpha}")
    return int(alpha)


def _check_alpha(kind, alpha):
    tag = kind.tag
    if tag in ("impulse", "gauss", "lorentz", "fejer-continuous", "dilated"):
        if not (alpha > 0 and math.isfinite(alpha)):
            raise ParameterDomainError(f"{tag}: alpha must be positive, got {alpha}")
        return float(alpha)
    if tag == "poisson":
        if not 0 <= alpha < 1:
            raise ParameterDomainError(f"poisson: need 0 <= alpha < 1, got {alpha}")
        return float(alpha)
    if tag == "fejer-discrete":
        return _integer(alpha, 1, "fejer-discrete k")
    if tag == "poussin":
        n = _integer(alpha, 0, "poussin n")
        if kind.p > n:
            raise ParameterDomainError(f"poussin: need p <= n, got p={kind.p}, n={n}")
        return n
    return _integer(alpha, 0, f"{tag} order")


def support(kind, alpha):
    """Nominal support ``(lo, hi)`` of ``delta_alpha``."""
    alpha = _check_alpha(kind, alpha)
    if kind.tag == "impulse":
        return 0.0, 1.0 / alpha
    if kind.tag == "landau":
        return -kind.support_halfwidth, kind.support_halfwidth
    if kind.tag in ("poisson", "fejer-discrete", "dirichlet", "modified-dirichlet", "poussin"):
        return -math.pi, math.pi
    return -math.inf, math.inf


def _cosine_series(c0, coeffs, x):
    """``c0 + sum_j coeffs[j-1] cos(j x)``."""
    out = np.full(x.shape, c0)
    for j, cj in enumerate(coeffs, start=1):
        if cj:
            out = out + cj * np.cos(j * x)
    return out


def eval_delta(kind, alpha, x):
    """Value of ``delta_alpha(x)``; zero outside a compact nominal support."""
    alpha = _check_alpha(kind, alpha)
    xa = np.asarray(x, dtype=float)
    tag = kind.tag
    if tag == "impulse":
        # closed support so the composite rule sees the full height at both ends
        out = np.where((xa >= 0) & (xa <= 1.0 / alpha), alpha, 0.0)
    elif tag == "gauss":
        out = gauss_density(xa / alpha) / alpha
    elif tag == "lorentz":
        # n alpha^n |x|^(n-1) / (pi (x^2n + alpha^2n)); unit mass for every n
        n = kind.order
        u = np.abs(xa) / alpha
        out = n * u ** (n - 1) / (math.pi * alpha * (u ** (2 * n) + 1.0))
    elif tag == "landau":
        a, n = kind.support_halfwidth, alpha
        log_norm = (2 * n + 1) * math.log(a) + math.log(special.beta(0.5, n + 1))
        inside = np.abs(xa) <= a
        base = np.where(inside, a * a - xa * xa, 1.0)
        with np.errstate(divide="ignore"):
            vals = np.exp(n * np.log(base) - log_norm) if n else np.exp(-log_norm) + 0 * base
        out = np.where(inside, vals, 0.0)
    elif tag == "poisson":
        inside = np.abs(xa) <= math.pi
        vals = (1 - alpha**2) / (2 * math.pi * (1 - 2 * alpha * np.cos(xa) + alpha**2))
        out = np.where(inside, vals, 0.0)
    elif tag == "fejer-continuous":
        # sin^2(alpha x) / (pi alpha x^2)
        out = alpha / math.pi * np.sinc(alpha * xa / math.pi) ** 2
    elif tag == "dilated":
        out = np.asarray(kind.density(xa / alpha), dtype=float) / alpha
    else:
        if tag == "dirichlet":
            coeffs = [1.0 / math.pi] * alpha
        elif tag == "modified-dirichlet":
            coeffs = [1.0 / math.pi] * alpha
            if alpha:
                coeffs[-1] = 0.5 / math.pi
        elif tag == "fejer-discrete":
            coeffs = [(1.0 - j / alpha) / math.pi for j in range(1, alpha)]
        else:  # poussin
            n, p = alpha, kind.p
            coeffs = [1.0 / math.pi] * (n - p) + [
                (1.0 - k / (p + 1)) / math.pi for k in range(1, p + 1)
            ]
        c0 = 1.0 / (2.0 * math.pi)
        if tag == "modified-dirichlet" and alpha == 0:
            c0 = 0.0  # sin(0 x) / tan(x/2) vanishes identically
        inside = np.abs(xa) <= math.pi
        out = np.where(inside, _cosine_series(c0, coeffs, xa), 0.0)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def _length_scale(kind, alpha):
    tag = kind.tag
    if tag in ("gauss", "lorentz", "dilated"):
        return alpha
    if tag == "impulse":
        return 1.0 / alpha
    if tag == "landau":
        return kind.support_halfwidth / math.sqrt(2 * alpha + 1)
    if tag == "poisson":
        return max(1.0 - alpha, 1e-3)
    if tag == "fejer-continuous":
        return 1.0 / alpha
    return math.pi / (alpha + 1)


def _heavy_tailed(kind):
    if kind.tag in ("lorentz", "fejer-continuous"):
        return True
    if kind.tag == "dilated":
        return float(kind.density(40.0)) > 1e-12 * float(kind.density(0.0))
    return False


def tail_mass(kind, alpha, lo, hi):
    """Upper bound on the mass of ``delta_alpha`` outside ``[lo, hi]``.

    Returns None when no bound is known (a caller-supplied density).
    """
    alpha = _check_alpha(kind, alpha)
    s_lo, s_hi = support(kind, alpha)
    if lo <= s_lo and hi >= s_hi:
        return 0.0
    tag = kind.tag
    density = kind.density if tag == "dilated" else None
    if tag == "gauss" or density is gauss_density:
        return 0.5 * (special.erfc(-lo / (math.sqrt(2) * alpha)) + special.erfc(hi / (math.sqrt(2) * alpha)))
    if tag == "lorentz" or density is lorentz_density:
        n = kind.order if tag == "lorentz" else 1
        below = 0.5 - math.atan((-lo / alpha) ** n) / math.pi if lo < 0 else 1.0
        above = 0.5 - math.atan((hi / alpha) ** n) / math.pi if hi > 0 else 1.0
        return below + above
    if tag == "fejer-continuous":
        # sin^2 <= 1 bounds the tail by the integral of 1/(pi alpha x^2)
        return (1.0 / -lo if lo < 0 else math.inf) / (math.pi * alpha) + (
            1.0 / hi if hi > 0 else math.inf
        ) / (math.pi * alpha)
    return None


@dataclass(frozen=True)
class Quadrature:
    """Composite Simpson rule on ``[lo, hi]`` with spacing at most ``step``.

    Unset fields default per kind. The range is the nominal support, or
    +-40 length scales when unbounded (+-4000 for algebraically decaying
    kernels). The step is 1/64 of the length scale (1/32 for the wide
    ranges).
    """

    step: float = None
    lo: float = None
    hi: float = None

    def interval(self, kind, alpha):
        s_lo, s_hi = support(kind, alpha)
        reach = _length_scale(kind, alpha) * (4000.0 if _heavy_tailed(kind) else 40.0)
        lo = self.lo if self.lo is not None else (s_lo if math.isfinite(s_lo) else -reach)
        hi = self.hi if self.hi is not None else (s_hi if math.isfinite(s_hi) else reach)
        return max(lo, s_lo), min(hi, s_hi)

    def nodes(self, kind, alpha):
        lo, hi = self.interval(kind, alpha)
        if not hi > lo:
            return np.array([lo, lo])
        step = self.step
        if step is None:
            step = _length_scale(kind, alpha) / (32.0 if _heavy_tailed(kind) else 64.0)
        n = max(2, math.ceil((hi - lo) / step))
        n += n % 2
        return np.linspace(lo, hi, n + 1)


def _simpson(kind, alpha, fn, quad):
    x = quad.nodes(kind, alpha)
    if x[-1] == x[0]:
        return 0.0
    return float(integrate.simpson(eval_delta(kind, alpha, x) * fn(x), x=x))


def convergence_probe(kind, schedule, test_fn, quadrature=None):
    """``integral(delta_alpha * test_fn)`` for each ``alpha`` in ``schedule``.

    The integral runs over the quadrature range clipped to the nominal
    support, so support discontinuities fall on the endpoints.
    """
    schedule = list(schedule)
    if not schedule:
        raise ArgumentError("convergence_probe needs a nonempty schedule")
    quad = quadrature or Quadrature()
    return [_simpson(kind, a, test_fn, quad) for a in schedule]


@dataclass(frozen=True)
class PositivityReport:
    min_value: float
    mass: float


def positivity_and_mass(kind, alpha, quadrature=None):
    """Smallest sampled value and total mass of ``delta_alpha``."""
    quad = quadrature or Quadrature()
    x = quad.nodes(kind, alpha)
    values = eval_delta(kind, alpha, x)
    mass = _simpson(kind, alpha, np.ones_like, quad)
    return PositivityReport(float(np.min(values)), mass)
