"""
Closed-form constants for Hardy-Rellich type inequalities, the singular
solution amplitude and the radial supersolution, plus quadrature checks of
the inequalities on radial bumps.

Products are evaluated in exact rational arithmetic (``fractions.Fraction``)
and converted to float at the end, so integer-valued constants such as
A(18, 2) = 12006225 come out exact.  Empty products equal 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import calculus as jc


def _frac(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def _prod(factors):
    out = Fraction(1)
    for f in factors:
        out *= f
    return out


def A_exact(n, k):
    n = _frac(n)
    return _prod((n - 4 * k + 4 * i) ** 2 * (n + 4 * k - 4 * i - 4) ** 2
                 for i in range(k)) / Fraction(16) ** k


def B_exact(n, k):
    n = _frac(n)
    return ((n - 2) / 2) ** 2 * _prod((n - 4 * i - 2) ** 2 * (n + 4 * i - 2) ** 2
                                      for i in range(1, k + 1)) / Fraction(16) ** k


def A_const(n, k):
    """Rellich constant for int phi^2/|x|^{4k} <= int |Delta^k phi|^2.

    Valid for n > 4k; outside that range the product is still returned (see
    :func:`A_valid`).
    """
    return float(A_exact(n, k))


def B_const(n, k):
    """Constant for the gradient inequality with weight |x|^{-4k-2}; valid for n > 4k + 2."""
    return float(B_exact(n, k))


def A_valid(n, k):
    return n > 4 * k


def B_valid(n, k):
    return n > 4 * k + 2


def gamma_exact(n, alpha):
    n, alpha = _frac(n), _frac(alpha)
    return ((n - 2) / 2) ** 2 - ((alpha - 2) / 2) ** 2


def gamma_bar_exact(n, alpha):
    n, alpha = _frac(n), _frac(alpha)
    return ((n - 2) / 2) ** 2 + ((alpha - 2) / 2) ** 2


def mu_exact(n, alpha):
    """min over j >= 0 of |gamma + j(n - 2 + j)|^2, with the minimizing j.

    For n >= 2 the inner expression increases with j, so the scan stops at
    the first j where the modulus stops decreasing.
    """
    if n < 2:
        raise ValueError("mu is defined for n >= 2")
    n = _frac(n)
    g = gamma_exact(n, alpha)
    j, best = 0, abs(g)
    while True:
        nxt = abs(g + (j + 1) * (n - 2 + j + 1))
        if nxt >= best:
            return best**2, j
        j, best = j + 1, nxt


def gamma(n, alpha):
    return float(gamma_exact(n, alpha))


def gamma_bar(n, alpha):
    return float(gamma_bar_exact(n, alpha))


def mu(n, alpha):
    value, j = mu_exact(n, alpha)
    return float(value), j


def hr_weights(k):
    """Exponents alpha_i = -4k + 4i, i = 1..k."""
    return [-4 * k + 4 * i for i in range(1, k + 1)]


def mu_product_exact(n, k):
    return _prod(mu_exact(n, a)[0] for a in hr_weights(k))


def log_laplacian_exact(n, k):
    # 2^k prod gamma_bar(n, -4i) prod ((2i+1)/2)^2, i = 0..k-1
    return (Fraction(2) ** k
            * _prod(gamma_bar_exact(n, -4 * i) for i in range(k))
            * _prod(Fraction(2 * i + 1, 2) ** 2 for i in range(k)))


def log_gradient_exact(n, k):
    # 2^(k-2) prod gamma_bar(n, -4i-2) prod ((2i+3)/2)^2, i = 0..k-1
    return (Fraction(2) ** (k - 2)
            * _prod(gamma_bar_exact(n, -4 * i - 2) for i in range(k))
            * _prod(Fraction(2 * i + 3, 2) ** 2 for i in range(k)))


def hr_product_exact(n, k, variant="laplacian"):
    """Constant of the order-2k (laplacian) or order-2k+1 (gradient) inequality.

    Returns ``(value, branch)`` with branch ``"power"`` when the mu-product
    is nonzero and ``"log"`` when the log-weighted constant takes over.
    """
    if n < 2:
        raise ValueError("hr_product needs n >= 2; use oned_constant for n = 1")
    if variant == "laplacian":
        if k < 1:
            raise ValueError("laplacian variant needs k >= 1")
        value = mu_product_exact(n, k)
        if value != 0:
            return value, "power"
        return log_laplacian_exact(n, k), "log"
    if variant == "gradient":
        if k < 0:
            raise ValueError("gradient variant needs k >= 0")
        value = (Fraction(n - 2, 2)) ** 2 * mu_product_exact(n, k)
        if value != 0:
            return value, "power"
        return log_gradient_exact(n, k), "log"
    raise ValueError(f"unknown variant {variant!r}")


def hr_product(n, k, variant="laplacian"):
    value, _ = hr_product_exact(n, k, variant)
    return float(value)


def oned_exact(k):
    # the product is taken to be 0 when k = 0, as in the source convention
    if k < 0:
        raise ValueError("k >= 0 required")
    if k == 0:
        return Fraction(0)
    return Fraction(1, 2 ** (4 * k + 2)) * _prod(
        Fraction((4 * i - 3) ** 2 * (4 * i - 5) ** 2) for i in range(k))


def oned_constant(k):
    """Constant in front of int phi^2/|x|^{4k+2} bounded by int |phi^(2k+1)|^2 on R.

    Returns 0 for k = 0 by convention (the classical value there is 1/4).
    """
    return float(oned_exact(k))


def lambda_S_exact(m, n):
    return Fraction(2**m * math.factorial(m)) * _prod(Fraction(n - 2 * k) for k in range(1, m + 1))


def lambda_S(m, n):
    """Amplitude of the singular solution -2m log r; positive iff n > 2m."""
    return float(lambda_S_exact(m, n))


def _supersolution_C(m, n):
    if m < 2 or m % 2:
        raise ValueError("supersolution constants need m even >= 2")
    if n == 3:
        raise NotImplementedError("n = 3 involves an unspecified additive constant")
    if n < 4:
        raise ValueError("supersolution constants need n >= 4")
    return 1 / (_prod(Fraction(2 * j - 3) for j in range(1, m + 1))
                * _prod(Fraction(n + 2 * j - 3) for j in range(m)))


def supersolution_radius(m, n):
    """Minimizer of exp(|C| r^p)/r^3, p = 2m - 3: solves p |C| r^p = 3."""
    p = 2 * m - 3
    return (3.0 / (p * float(abs(_supersolution_C(m, n))))) ** (1.0 / p)


def supersolution_constants(m, n):
    """(C_{n,m}, lambda_{n,m}) of the explicit radial supersolution, n >= 4.

    C = [prod_{j=1}^m (2j-3) prod_{j=0}^{m-1} (n+2j-3)]^{-1} and lambda is the
    minimum over r > 0 of exp(|C| r^(2m-3))/r^3.
    """
    C = float(_supersolution_C(m, n))
    r_star = supersolution_radius(m, n)
    return C, math.exp(abs(C) * r_star ** (2 * m - 3)) / r_star**3


@dataclass
class HRQuery:
    n: int
    k: int = 1
    alpha: float = 0.0
    beta: float = 0.0


@dataclass
class ConstantsTable:
    n: int
    k: int
    m: int | None = None
    alpha: float = 0.0
    beta: float = 0.0
    A: float = 0.0
    A_valid: bool = False
    B: float = 0.0
    B_valid: bool = False
    gamma: float | None = None
    mu: float | None = None
    mu_argmin: int | None = None
    gamma_bar: float | None = None
    hr_laplacian: float | None = None
    hr_laplacian_branch: str | None = None
    hr_gradient: float | None = None
    hr_gradient_branch: str | None = None
    oned: float = 0.0
    lambda_S: float | None = None
    C_nm: float | None = None
    lambda_nm: float | None = None
    notes: list = field(default_factory=list)


def constants_table(n, k=1, m=None, alpha=0.0, beta=0.0):
    t = ConstantsTable(n=n, k=k, m=m, alpha=alpha, beta=beta)
    t.A, t.A_valid = A_const(n, k), A_valid(n, k)
    t.B, t.B_valid = B_const(n, k), B_valid(n, k)
    t.oned = oned_constant(k)
    if n >= 2:
        t.gamma = gamma(n, alpha)
        t.mu, t.mu_argmin = mu(n, alpha)
        t.gamma_bar = gamma_bar(n, alpha)
        if k >= 1:
            v, t.hr_laplacian_branch = hr_product_exact(n, k, "laplacian")
            t.hr_laplacian = float(v)
        v, t.hr_gradient_branch = hr_product_exact(n, k, "gradient")
        t.hr_gradient = float(v)
    if k == 0:
        t.notes.append("oned constant uses the k = 0 convention (0, not the classical 1/4)")
    if m is not None:
        t.lambda_S = lambda_S(m, n)
        if m % 2 == 0 and n >= 4:
            t.C_nm, t.lambda_nm = supersolution_constants(m, n)
    return t


# -- quadrature verification -------------------------------------------------

VARIANTS = ("laplacian", "gradient", "log_second_order", "log_laplacian",
            "log_gradient", "oned")


def inequality_constant(query, variant):
    n, k = query.n, query.k
    if variant == "laplacian":
        return float(mu_product_exact(n, k))
    if variant == "gradient":
        return float(Fraction(n - 2, 2) ** 2 * mu_product_exact(n, k))
    if variant == "log_second_order":
        return float(2 * gamma_bar_exact(n, query.alpha)
                     * ((_frac(query.beta) + 1) / 2) ** 2)
    if variant == "log_laplacian":
        return float(log_laplacian_exact(n, k))
    if variant == "log_gradient":
        return float(log_gradient_exact(n, k))
    if variant == "oned":
        return oned_constant(k)
    raise ValueError(f"unknown variant {variant!r}")


def _integrands(query, variant, phi, r):
    """Return (weighted L2 density, derivative energy density) at nodes r."""
    n, k = query.n, query.k
    if variant == "oned":
        n = 1
    if variant in ("laplacian", "log_laplacian"):
        energy = jc.iterated_laplacian(phi.jet(r, 2 * k), r, n, k)[0] ** 2
    elif variant in ("gradient", "log_gradient", "oned"):
        lap = jc.iterated_laplacian(phi.jet(r, 2 * k + 1), r, n, k)
        energy = lap[1] ** 2
    else:
        lap = jc.radial_laplacian(phi.jet(r, 2), r, n)[0]
        energy = r**query.alpha * lap**2 / np.log(r) ** query.beta
    f2 = phi(r) ** 2
    if variant == "laplacian":
        weighted = f2 / r ** (4 * k)
    elif variant in ("gradient", "oned"):
        weighted = f2 / r ** (4 * k + 2)
    elif variant == "log_laplacian":
        weighted = f2 / (r ** (4 * k) * np.log(r) ** (2 * k))
    elif variant == "log_gradient":
        weighted = f2 / (r ** (4 * k + 2) * np.log(r) ** (2 * k + 2))
    else:
        weighted = r ** (query.alpha - 4) * f2 / np.log(r) ** (query.beta + 2)
    return weighted, energy


def verify_hr_inequality(query, variant, phi, R=1.0, nodes=2048):
    """Check one Hardy-Rellich type inequality on a radial test function.

    Parameters
    ----------
    query : HRQuery
    variant : str
        One of ``VARIANTS``.
    phi : RadialTestFunction
        Supported in an annulus [a, b] with a > max(R, 1).
    R : float
        Inner radius of the exterior domain (relevant for log weights).
    nodes : int
        Minimum number of quadrature nodes.

    Returns
    -------
    lhs, rhs, margin : float
        ``lhs`` is the weighted L2 integral, ``rhs`` the derivative energy and
        ``margin = rhs - constant * lhs``.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if phi.kind == "zero":
        return 0.0, 0.0, 0.0
    a, b = phi.support
    if a <= max(R, 1.0):
        raise ValueError(f"support [{a}, {b}] must lie beyond max(R, 1) = {max(R, 1.0)}")
    n = 1 if variant == "oned" else query.n
    x, w = jc.radial_rule(a, b, min_nodes=nodes)
    weighted, energy = _integrands(query, variant, phi, x)
    area = jc.sphere_area(n) * x ** (n - 1) * w
    lhs = float(np.sum(weighted * area))
    rhs = float(np.sum(energy * area))
    c = inequality_constant(query, variant)
    return lhs, rhs, rhs - c * lhs
