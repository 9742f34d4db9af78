"""
Truncated Taylor arithmetic, radial Laplacians and composite quadrature.

A jet is an array ``c`` of shape ``(order + 1, npts)`` holding the Taylor
coefficients of a function at ``npts`` base points,

    f(r + h) = sum_j c[j] h**j + O(h**(order + 1)),

so ``c[j] = f^(j)(r) / j!``.  Products, reciprocals, exponentials and
logarithms of jets follow the usual power-series recurrences, which gives
exact derivatives of the bump and cutoff families to any order without a
computer-algebra system.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def variable(r, order):
    """Jet of the identity map r -> r."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    c = np.zeros((order + 1, r.size))
    c[0] = r
    if order >= 1:
        c[1] = 1.0
    return c


def affine(r, order, scale, offset):
    """Jet of r -> scale * r + offset."""
    c = variable(r, order) * scale
    c[0] += offset
    return c


def constant(value, order, npts):
    c = np.zeros((order + 1, npts))
    c[0] = value
    return c


def mul(a, b):
    order = a.shape[0] - 1
    out = np.zeros_like(a)
    for j in range(order + 1):
        out[j] = np.einsum("ij,ij->j", a[: j + 1], b[j::-1])
    return out


def reciprocal(a):
    order = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = 1.0 / a[0]
    for j in range(1, order + 1):
        out[j] = -np.einsum("ij,ij->j", a[1 : j + 1], out[j - 1 :: -1]) * out[0]
    return out


def exp(a):
    # f = exp(a)  =>  j f_j = sum_{k=1}^{j} k a_k f_{j-k}
    order = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    k = np.arange(1, order + 1)[:, None]
    for j in range(1, order + 1):
        out[j] = np.einsum("ij,ij->j", k[:j] * a[1 : j + 1], out[j - 1 :: -1]) / j
    return out


def log(a):
    # f = log(a)  =>  a_0 j f_j = j a_j - sum_{k=1}^{j-1} k f_k a_{j-k}
    order = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for j in range(1, order + 1):
        acc = j * a[j]
        for k in range(1, j):
            acc = acc - k * out[k] * a[j - k]
        out[j] = acc / (j * a[0])
    return out


def derivative(a):
    """Jet of f' (one order shorter)."""
    order = a.shape[0] - 1
    k = np.arange(1, order + 1)[:, None]
    return k * a[1:]


def radial_laplacian(a, r, n):
    """Jet of v'' + (n - 1)/r v' given the jet of v at base points r.

    Two orders are lost per application.
    """
    d1 = derivative(a)
    d2 = derivative(d1)
    if n == 1:
        return d2
    inv_r = reciprocal(variable(r, d2.shape[0] - 1))
    return d2 + (n - 1) * mul(inv_r, d1[:-1])


def iterated_laplacian(a, r, n, k):
    for _ in range(k):
        a = radial_laplacian(a, r, n)
    return a


def sphere_area(n):
    """Surface measure of the unit sphere in R^n (2 for n = 1)."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


@lru_cache(maxsize=None)
def _gauss_legendre(nodes):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return x, w


def panel_rule(edges, nodes_per_panel=32):
    """Composite Gauss-Legendre rule over consecutive panels.

    Parameters
    ----------
    edges : array_like
        Increasing panel boundaries.
    nodes_per_panel : int
        Gauss-Legendre points in each panel.

    Returns
    -------
    x, w : ndarray
        Flattened nodes and weights.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    t, wt = _gauss_legendre(nodes_per_panel)
    x = 0.5 * (hi - lo) * t[None, :] + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * wt[None, :]
    return x.ravel(), w.ravel()


def log_panels(a, b, panels):
    """Panel edges geometrically spaced on [a, b], a > 0."""
    return np.geomspace(a, b, panels + 1)


def radial_rule(a, b, min_nodes=2048, nodes_per_panel=32, inner=None):
    """Quadrature rule on [a, b] with log-spaced panels.

    When ``a == 0`` a single uniform panel covers ``[0, inner]`` (default
    ``b * 1e-6``) and log-spaced panels cover the rest.
    """
    panels = max(1, -(-min_nodes // nodes_per_panel))
    if a > 0:
        return panel_rule(log_panels(a, b, panels), nodes_per_panel)
    inner = b * 1e-6 if inner is None else inner
    edges = np.concatenate([[0.0], log_panels(inner, b, panels)])
    return panel_rule(edges, nodes_per_panel)
