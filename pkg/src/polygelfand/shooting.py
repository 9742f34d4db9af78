"""
Global-versus-blow-up classification and the threshold Phi_alpha.

For m even and n >= 3 the global data with u(0) = alpha form the half-line
set {beta_{m-1} <= Phi_alpha(beta_1, ..., beta_{m-2})}.  A solution blows up
exactly when Delta^{m-1} u reaches zero, which makes the blow-up side of the
bisection rigorous; the global side can only be checked up to the horizon.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .radial_ode import (InitialConditions, IntegratorConfig, ProblemSpec,
                         TerminalEvent, integrate)

logger = logging.getLogger(__name__)


class DomainError(ValueError):
    """Query outside the parameter range where the operation is defined."""


class ShootingError(RuntimeError):
    pass


class Tag(str, enum.Enum):
    GLOBAL = "GlobalToHorizon"
    BLOW_UP = "BlowUp"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Outcome:
    tag: Tag
    r_event: float | None
    tail: object
    certificate: str = ""


def classify(trajectory):
    """Classify a trajectory produced by :func:`radial_ode.integrate`."""
    ev = trajectory.terminal_event
    tail = trajectory.terminal
    if ev is TerminalEvent.FLUX_SIGN_EVENT:
        return Outcome(Tag.BLOW_UP, trajectory.r_event, tail, "Delta^{m-1}u >= 0")
    if ev is TerminalEvent.OVERFLOW_GUARD:
        return Outcome(Tag.BLOW_UP, trajectory.r_event, tail, "overflow guard (numerical)")
    if trajectory.problem.even and tail.w[-1] >= 0:
        return Outcome(Tag.INCONCLUSIVE, None, tail, "Delta^{m-1}u >= 0 at the horizon")
    return Outcome(Tag.GLOBAL, None, tail, "reached horizon")


@dataclass
class ShootingResult:
    n: int
    alpha: float
    beta_prime: tuple
    phi_estimate: float
    bracket: tuple
    evaluations: int
    tolerance_achieved: float
    warnings: list = field(default_factory=list)

    @property
    def m(self):
        return len(self.beta_prime) + 2

    def ic(self, beta_last):
        return InitialConditions((self.alpha, *self.beta_prime, beta_last))


def _check_even(m, n):
    if m % 2:
        raise DomainError(f"Phi_alpha is defined for m even (got m={m})")
    if n < 3:
        raise DomainError(f"Phi_alpha needs n >= 3 (got n={n}); no global solutions otherwise")


def phi_alpha(n, alpha, beta_prime=(), tol=1e-6, config=None, floor=-1e12):
    """Bisect on beta_{m-1} for the boundary of the global set.

    Parameters
    ----------
    n : int
        Dimension, >= 3.
    alpha : float
        u(0).
    beta_prime : sequence of float
        (beta_1, ..., beta_{m-2}); its length fixes m = len + 2.
    tol : float
        Absolute bracket width on beta_{m-1}.
    config : IntegratorConfig, optional
    floor : float
        Give up when the geometric descent passes this value.

    Returns
    -------
    ShootingResult
        ``bracket = (b_global, b_blowup)`` with classified endpoints.
        Inconclusive trials are placed on the blow-up side and reported in
        ``warnings``.
    """
    beta_prime = tuple(float(b) for b in beta_prime)
    m = len(beta_prime) + 2
    _check_even(m, n)
    if tol <= 0:
        raise ValueError("tol must be positive")
    problem = ProblemSpec(m, n)
    config = (config or IntegratorConfig()).replace(samples_per_decade=0)
    warnings = []
    evaluations = 0

    def trial(b):
        nonlocal evaluations
        evaluations += 1
        out = classify(integrate(problem, InitialConditions((alpha, *beta_prime, b)), config))
        if out.tag is Tag.INCONCLUSIVE:
            warnings.append(f"inconclusive at beta={b!r}; counted as blow-up side")
        return out.tag is Tag.GLOBAL

    hi = 0.0
    if trial(hi):
        raise ShootingError("beta_{m-1} = 0 classified global; horizon too short?")
    lo = -1.0
    while not trial(lo):
        hi = lo
        lo *= 2.0
        if lo < floor:
            raise ShootingError(f"no global endpoint found above beta_{{m-1}} = {floor:g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if trial(mid):
            lo = mid
        else:
            hi = mid
    warnings.append("blow-up side certified; global side checked only up to the horizon")
    logger.info("phi_alpha n=%d alpha=%g beta'=%s -> [%.12g, %.12g] in %d runs",
                n, alpha, beta_prime, lo, hi, evaluations)
    return ShootingResult(n, float(alpha), beta_prime, 0.5 * (lo + hi), (lo, hi),
                          evaluations, hi - lo, warnings)


def scan_phi_monotonicity(n, alpha, axis, grid, base=None, m=4, tol=1e-6, config=None):
    """Phi_alpha along coordinate ``axis`` (1-based) of beta'.

    Returns a list of (t, phi) pairs; Phi_alpha is expected to decrease in t.
    """
    if m < 4 or m % 2:
        raise DomainError("monotonicity scan needs m >= 4 even (beta' is empty for m = 2)")
    grid = [float(t) for t in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    if not 1 <= axis <= m - 2:
        raise ValueError(f"axis must be in 1..{m - 2}")
    base = list(base) if base is not None else [0.0] * (m - 2)
    out = []
    for t in grid:
        bp = list(base)
        bp[axis - 1] = t
        out.append((t, phi_alpha(n, alpha, bp, tol, config).phi_estimate))
    return out


@dataclass
class ComparisonReport:
    holds: bool
    first_violation: tuple | None
    shared_samples: int
    r_common: float
    min_gap: float


def comparison_check(problem, ic_u, ic_v, config=None, slack=None):
    """Check that ordered data at r = 0 give ordered u, u', Delta^k u, (Delta^k u)'.

    Both trajectories are sampled on the same log grid, so the comparison
    runs over the radii they share (up to the earlier blow-up).  A gap below
    ``-slack * max(1, |value|)`` counts as a violation; the default slack is
    10 * rtol.
    """
    if len(ic_u) != problem.m or len(ic_v) != problem.m:
        raise ValueError("initial data do not match the problem order")
    if not problem.even:
        raise DomainError("comparison needs an increasing nonlinearity (m even)")
    if any(a < b for a, b in zip(ic_u.alpha, ic_v.alpha)):
        raise ValueError("ic_u must dominate ic_v componentwise")
    config = config or IntegratorConfig()
    slack = 10 * config.rtol if slack is None else slack
    tu = integrate(problem, ic_u, config)
    tv = integrate(problem, ic_v, config)
    shared, iu, iv = np.intersect1d(tu.r, tv.r, assume_unique=True, return_indices=True)
    a = np.hstack([tu.w[iu], tu.dw[iu]])
    b = np.hstack([tv.w[iv], tv.dw[iv]])
    gap = a - b
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    bad = gap < -slack * scale
    violation = None
    if bad.any():
        i, c = np.argwhere(bad)[0]
        m = problem.m
        name = f"w{c}" if c < m else f"dw{c - m}"
        violation = (float(shared[i]), name, float(gap[i, c]))
    min_gap = float(np.min(gap / scale)) if gap.size else 0.0
    return ComparisonReport(not bad.any(), violation, int(shared.size),
                            float(shared[-1]) if shared.size else 0.0, min_gap)
