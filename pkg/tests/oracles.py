"""Independent reference computations used by the test suite."""

import math

import mpmath
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import RectBivariateSpline

EPS0 = 1e-9 / (36.0 * math.pi)

# second-order central stencils: offsets and weights (before dividing by h^q)
_STENCILS = {
    1: ([-1, 1], [-0.5, 0.5]),
    2: ([-1, 0, 1], [1.0, -2.0, 1.0]),
    3: ([-2, -1, 1, 2], [-0.5, 1.0, -1.0, 0.5]),
    4: ([-2, -1, 0, 1, 2], [1.0, -4.0, 6.0, -4.0, 1.0]),
}


def richardson_derivative(f, x, q, h0, levels=5):
    """Romberg-extrapolated central difference of order ``q`` at ``x``.

    Every stencil has an even error expansion in ``h``, so each level removes
    one more power of ``h^2``.
    """
    offs, wts = _STENCILS[q]
    table = []
    for lvl in range(levels):
        h = h0 / 2**lvl
        est = sum(w * f(x + o * h) for o, w in zip(offs, wts)) / h**q
        row = [est]
        for m in range(1, lvl + 1):
            prev = table[lvl - 1][m - 1]
            row.append(row[m - 1] + (row[m - 1] - prev) / (4**m - 1))
        table.append(row)
    return table[-1][-1]


def shannon_mp(x, delta, sigma):
    """Regularized Shannon kernel at the current mpmath precision."""
    x, delta, sigma = mpmath.mpf(x), mpmath.mpf(delta), mpmath.mpf(sigma)
    u = mpmath.pi * x / delta
    return mpmath.sinc(u) * mpmath.exp(-x * x / (2 * sigma * sigma))


def fold_oracle(n, weights, left=None, right=None, periodic=False):
    """Differentiation matrix by explicit elimination of fictitious nodes.

    Every node ``-M..n-1+M`` is an unknown. Fictitious ones obey
    ``f_p = a_i f_mirror + (1 - a_i) f_edge`` (or wraparound when periodic);
    that linear system is solved for the fictitious values in terms of the
    ``n`` real ones.
    """
    w = np.asarray(weights, dtype=float)
    m = (w.size - 1) // 2
    idx = list(range(-m, n + m))
    fict = [p for p in idx if p < 0 or p > n - 1]
    pos = {p: k for k, p in enumerate(fict)}
    a_ff = np.eye(len(fict))
    a_fi = np.zeros((len(fict), n))

    def put(row, node, coef):
        if 0 <= node <= n - 1:
            a_fi[row, node] -= coef
        else:
            a_ff[row, pos[node]] -= coef

    for p in fict:
        row = pos[p]
        if periodic:
            put(row, p % n, 1.0)
            continue
        if p < 0:
            i, a, edge, mirror = -p, left[-p - 1], 0, -p
        else:
            i = p - (n - 1)
            a, edge, mirror = right[i - 1], n - 1, n - 1 - i
        put(row, mirror, a)
        put(row, edge, 1.0 - a)
    ext_f = np.linalg.solve(a_ff, -a_fi)
    full = np.zeros((n, n))
    for k in range(n):
        for j in range(-m, m + 1):
            node = k + j
            if 0 <= node <= n - 1:
                full[k, node] += w[j + m]
            else:
                full[k] += w[j + m] * ext_f[pos[node]]
    return full


def laplace_box_series(x, y, top=10.0, terms=2001):
    """Potential in the unit box with ``V = top`` on ``y = 1``, 0 elsewhere."""
    total = 0.0
    for n in range(1, terms + 1, 2):
        k = n * math.pi
        # sinh(k y) / sinh(k) written to avoid overflow
        ratio = math.exp(k * (y - 1.0)) * (1 - math.exp(-2 * k * y)) / (1 - math.exp(-2 * k))
        total += 4.0 * top / k * math.sin(k * x) * ratio
    return total


def fd_poisson_reference(n, source, top=10.0):
    """Five-point finite-difference solve on an ``n x n`` unit-box grid.

    ``source(x, y)`` returns the right-hand side ``f`` of ``Lap V = -f``.
    """
    h = 1.0 / (n - 1)
    x = np.linspace(0.0, 1.0, n)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    f = source(xx, yy)
    k = n - 2
    t = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(k, k)) / h**2
    eye = sp.identity(k)
    a = (sp.kron(t, eye) + sp.kron(eye, t)).tocsc()
    v = np.zeros((n, n))
    v[:, -1] = top
    v[0, :] = 0.0
    v[-1, :] = 0.0
    b = -f[1:-1, 1:-1].copy()
    b[:, -1] -= top / h**2
    v[1:-1, 1:-1] = spla.spsolve(a, b.ravel()).reshape(k, k)
    return x, v


def patch_relative_error(report, patch, ref_n=257):
    """Max DSC minus FD difference over the DSC nodes, relative to the FD peak.

    The reference is solved on ``ref_n`` nodes per side with the patch
    sampled on its own nodes and carried to the DSC nodes by a bicubic spline.
    """
    scale = patch.density / (EPS0 * patch.eps_r)
    x, vref = fd_poisson_reference(ref_n, lambda a, b: np.where(patch.contains(a, b), scale, 0.0))
    nodes = report.field.grid.nodes(0)
    ref_on_nodes = RectBivariateSpline(x, x, vref, kx=3, ky=3)(nodes, nodes)
    return float(np.max(np.abs(report.field.values - ref_on_nodes)) / np.max(np.abs(vref)))
