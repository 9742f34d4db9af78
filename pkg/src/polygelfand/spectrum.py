"""
Characteristic polynomials of the radial operator in Emden variables.

Q_m(t) = (-1)^m prod_{j=0}^{m-1} (t - 2j)(t + n - 2j - 2) and
P_m(t) = Q_m(t) - lambda_S.  Coefficients are built exactly with Python
integers, highest degree first (numpy.roots order).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import A_exact, B_exact, lambda_S_exact


def _convolve(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def Qm_coefficients(m, n):
    """Exact integer coefficients of Q_m, highest degree first."""
    if m < 1 or n < 1:
        raise ValueError("need m >= 1 and n >= 1")
    coeffs = [1]
    for j in range(m):
        coeffs = _convolve(coeffs, [1, -2 * j])
        coeffs = _convolve(coeffs, [1, n - 2 * j - 2])
    sign = -1 if m % 2 else 1
    return [sign * c for c in coeffs]


def Pm_coefficients(m, n):
    lam = lambda_S_exact(m, n)
    assert lam.denominator == 1
    coeffs = Qm_coefficients(m, n)
    coeffs[-1] -= int(lam)
    return coeffs


def _polish(coeffs, z, iterations=3):
    # Newton steps in extended precision on each root
    c = np.asarray(coeffs, dtype=np.clongdouble)
    dc = np.polyder(c)
    z = np.asarray(z, dtype=np.clongdouble)
    for _ in range(iterations):
        d = np.polyval(dc, z)
        ok = d != 0
        z = np.where(ok, z - np.polyval(c, z) / np.where(ok, d, 1), z)
    return z.astype(complex)


def _merge_clusters(z, radius):
    """Replace numerically split multiple roots by their cluster mean."""
    z = list(z)
    out, mult = [], []
    while z:
        root = z.pop(0)
        group = [root]
        rest = []
        for w in z:
            if abs(w - root) <= radius * (1 + abs(root)):
                group.append(w)
            else:
                rest.append(w)
        z = rest
        centre = complex(np.mean(group))
        out.extend([centre] * len(group))
        mult.extend([len(group)] * len(group))
    return np.array(out), np.array(mult)


def find_roots(coeffs, cluster_radius=1e-6):
    """All complex roots of an integer polynomial, with multiplicity.

    Companion-matrix eigenvalues, Newton polishing of simple roots, and
    averaging of clusters so a double root does not show up as a spurious
    conjugate pair.
    """
    c = np.asarray(coeffs, dtype=float)
    raw = np.roots(c)
    merged, mult = _merge_clusters(raw, cluster_radius)
    simple = mult == 1
    merged[simple] = _polish(coeffs, merged[simple])
    order = np.lexsort((merged.imag, merged.real))
    return merged[order], mult[order]


def residual_bounds(coeffs, roots):
    """|P(z)| / sum_k |c_k| |z|^k at each root (relative backward error)."""
    c = np.asarray(coeffs, dtype=float)
    scale = np.polyval(np.abs(c), np.abs(roots))
    return np.abs(np.polyval(c, roots)) / scale


def nonreal_mask(roots, tol=1e-8):
    return np.abs(roots.imag) > tol * (1 + np.abs(roots))


@dataclass
class SpectrumReport:
    m: int
    n: int
    lambda_S: float
    q_coeffs: list
    p_coeffs: list
    roots: np.ndarray
    multiplicity: np.ndarray
    residuals: np.ndarray
    has_nonreal: bool
    tol: float
    notes: list = field(default_factory=list)


def Pm_roots(m, n, tol=1e-8):
    """Roots of P_m = Q_m - lambda_S and whether any is non-real."""
    if n <= 2 * m:
        raise ValueError(f"P_m roots need n > 2m (got m={m}, n={n})")
    q = Qm_coefficients(m, n)
    p = Pm_coefficients(m, n)
    roots, mult = find_roots(p)
    return SpectrumReport(
        m=m, n=n, lambda_S=float(lambda_S_exact(m, n)), q_coeffs=q, p_coeffs=p,
        roots=roots, multiplicity=mult, residuals=residual_bounds(p, roots),
        has_nonreal=bool(nonreal_mask(roots, tol).any()), tol=tol,
        notes=["root structure is evidence about the linearization, not a stability verdict"],
    )


def has_nonreal(m, n, tol=1e-8):
    return Pm_roots(m, n, tol).has_nonreal


def rellich_ratio(m, n):
    """A_{n,m/2} / lambda_S as an exact fraction."""
    return A_exact(n, m // 2) / lambda_S_exact(m, n)


def n_star(m, n_max=100000):
    """Smallest n > 2m with lambda_S(m, n) <= A_{n, m/2}, for m even.

    The ratio A/lambda_S increases with n above 2m, so a linear scan is exact.
    """
    if m < 2 or m % 2:
        raise ValueError("n_star is defined for even m >= 2")
    for n in range(2 * m + 1, n_max):
        if lambda_S_exact(m, n) <= A_exact(n, m // 2):
            return n
    raise RuntimeError(f"no critical dimension below {n_max}")


def stability_threshold_m12(m, n_max=10000):
    """Smallest n > 2m with lambda_S <= optimal Hardy (m=1) or Rellich (m=2) constant."""
    if m == 1:
        best = lambda n: B_exact(n, 0)
    elif m == 2:
        best = lambda n: A_exact(n, 1)
    else:
        raise ValueError("threshold only defined for m in {1, 2}")
    for n in range(2 * m + 1, n_max):
        if lambda_S_exact(m, n) <= best(n):
            return n
    raise RuntimeError("threshold not found")


def plot_samples(m, n, t_min=None, t_max=None, count=801):
    """(t, P_m(t)) samples for plotting."""
    p = np.asarray(Pm_coefficients(m, n), dtype=float)
    if t_min is None or t_max is None:
        r = np.roots(p)
        span = max(1.0, np.max(np.abs(r.real)))
        t_min, t_max = -1.1 * span, 1.1 * span
    t = np.linspace(t_min, t_max, count)
    return t, np.polyval(p, t)
