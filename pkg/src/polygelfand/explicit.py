"""
The closed-form family in the conformal dimension n = 2m,

    u(r) = c - 2m log(1 + lam^2 r^2),   c = 2m log(2 ((2m)!)^{1/(2m)} lam).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import calculus as jc
from .radial_ode import (InitialConditions, IntegratorConfig, ProblemSpec,
                         TerminalEvent, Trajectory, log_grid)


@dataclass(frozen=True)
class ExplicitSolution:
    m: int
    lam: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if self.x0 != 0:
            raise NotImplementedError("only centred (x0 = 0) radial evaluation is supported")

    @property
    def n(self):
        return 2 * self.m

    @property
    def c(self):
        m = self.m
        return 2 * m * (math.log(2 * self.lam) + math.lgamma(2 * m + 1) / (2 * m))

    def jet(self, r, order):
        """Taylor jet of u at r (see :mod:`polygelfand.calculus`)."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        x = jc.variable(r, order)
        g = jc.mul(x, x) * self.lam**2
        g[0] += 1.0
        out = -2 * self.m * jc.log(g)
        out[0] += self.c
        return out


def eval_explicit(sol, r, order=0):
    """u(r), or the array of derivatives u^(j)(r), j = 0..order, if order > 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    if order == 0:
        return sol.c - 2 * sol.m * np.log1p((sol.lam * r) ** 2)
    jet = sol.jet(r.ravel(), order)
    fact = np.array([math.factorial(j) for j in range(order + 1)])[:, None]
    return (jet * fact).reshape((order + 1,) + r.shape)


def explicit_initial_values(m, lam=1.0):
    """(alpha_0, (beta_1, ..., beta_{m-1})) with beta_k = Delta^k u(0).

    u = c + sum_j a_j r^{2j} with a_j = 2m (-1)^j lam^{2j} / j, and
    Delta^k r^{2k} = prod_{j=1}^k 2j (n + 2j - 2) with n = 2m.
    """
    if m < 2:
        raise ValueError("need m >= 2 for a nonempty beta")
    n = 2 * m
    sol = ExplicitSolution(m, lam)
    beta = []
    for k in range(1, m):
        a_k = 2 * m * (-1) ** k * lam ** (2 * k) / k
        beta.append(a_k * math.prod(2 * j * (n + 2 * j - 2) for j in range(1, k + 1)))
    return sol.c, tuple(beta)


def laplacian_jets(sol, r, k, order=0):
    """Jets of Delta^j u for j = 0..k at r, each of the given order."""
    jet = sol.jet(r, 2 * k + order)
    out = [jet[: order + 1]]
    for _ in range(k):
        jet = jc.radial_laplacian(jet, np.atleast_1d(r), sol.n)
        out.append(jet[: order + 1])
    return out


def explicit_residual(m, r_samples, lam=1.0):
    """max_r |(-1)^m Delta^m u - e^u| / e^u over the samples."""
    r = np.atleast_1d(np.asarray(r_samples, dtype=float))
    if np.any(r <= 0):
        raise ValueError("samples must be positive")
    sol = ExplicitSolution(m, lam)
    lap = laplacian_jets(sol, r, m)
    u = lap[0][0]
    lhs = (-1) ** m * lap[m][0]
    return float(np.max(np.abs(lhs * np.exp(-u) - 1.0)))


def explicit_trajectory(m, lam=1.0, config=None):
    """Exact samples of the explicit solution on the integrator's output grid."""
    config = config or IntegratorConfig()
    sol = ExplicitSolution(m, lam)
    r = log_grid(config.r0, config.r_max, config.samples_per_decade or 400)
    r = np.append(r, config.r_max)
    lap = laplacian_jets(sol, r, m - 1, order=1)
    w = np.stack([j[0] for j in lap], axis=1)
    dw = np.stack([j[1] for j in lap], axis=1)
    alpha, beta = (sol.c, ()) if m == 1 else explicit_initial_values(m, lam)
    return Trajectory(ProblemSpec(m, 2 * m), InitialConditions((alpha, *beta)), r, w, dw,
                      TerminalEvent.REACHED_HORIZON, None, config, source="explicit")


def mass(m, lam=1.0):
    """|S^{n-1}| * int_0^inf e^u r^{n-1} dr with n = 2m."""
    sol = ExplicitSolution(m, lam)
    n = 2 * m
    val, _ = quad(lambda r: math.exp(sol.c - 2 * m * math.log1p((lam * r) ** 2)) * r ** (n - 1),
                  0, math.inf, epsabs=0, epsrel=1e-12, limit=200)
    return jc.sphere_area(n) * val
