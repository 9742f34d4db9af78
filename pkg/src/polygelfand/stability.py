"""
Second-variation quadratic forms on radial test functions.

For m even the form is  int |Delta^{m/2} phi|^2 - int e^u phi^2,  for m odd
the first term is  int |grad Delta^{(m-1)/2} phi|^2.  Radial integrals carry
the sphere factor |S^{n-1}| r^{n-1}.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import calculus as jc
from . import testfunctions as tf
from .constants import (log_gradient_exact, log_laplacian_exact, mu_product_exact,
                        oned_exact)
from .radial_ode import TerminalEvent


class Verdict(str, enum.Enum):
    WITNESS = "InstabilityWitnessFound"
    NO_WITNESS = "NoWitnessInFamily"
    CERTIFIED = "CertifiedOutsideCompact"
    INCONCLUSIVE = "Inconclusive"


class ExtensionError(ValueError):
    pass


@dataclass
class StabilityReport:
    verdict: Verdict
    form_values: list = field(default_factory=list)
    witness: object = None
    radius: float | None = None
    extended: bool = False
    notes: list = field(default_factory=list)


# -- u beyond the computed range --------------------------------------------------

@dataclass(frozen=True)
class TailModel:
    """u(r) ~ a + b log r (kind 'log') or a + b r^p (kind 'power') past r_end."""

    kind: str
    a: float
    b: float
    p: float
    r_end: float

    def __call__(self, r):
        if self.kind == "log":
            return self.a + self.b * np.log(r)
        return self.a + self.b * r**self.p


def fit_tail(trajectory):
    """Better of a power model (p = 2m - 2) and a log model over the last decade."""
    if trajectory.terminal_event is not TerminalEvent.REACHED_HORIZON:
        raise ExtensionError("only trajectories reaching the horizon can be extended")
    r, u = trajectory.r, trajectory.u
    win = r >= r[-1] / 10
    if win.sum() < 3:
        raise ExtensionError("not enough tail samples to fit an extension")
    rw, uw = r[win], u[win]
    models = []
    A = np.column_stack([np.ones_like(rw), np.log(rw)])
    coef, *_ = np.linalg.lstsq(A, uw, rcond=None)
    models.append(TailModel("log", coef[0], coef[1], 0.0, r[-1]))
    p = 2 * trajectory.problem.m - 2
    if p > 0:
        A = np.column_stack([np.ones_like(rw), rw**p])
        coef, *_ = np.linalg.lstsq(A, uw, rcond=None)
        models.append(TailModel("power", coef[0], coef[1], p, r[-1]))
    err = [np.max(np.abs(mdl(rw) - uw)) for mdl in models]
    return models[int(np.argmin(err))]


def _u_values(trajectory, r, extend):
    u = trajectory.u_at(r)
    beyond = r > trajectory.r[-1]
    if beyond.any():
        if not extend:
            raise ExtensionError(
                f"test function support reaches r={r.max():g} beyond data (r <= {trajectory.r[-1]:g})")
        u[beyond] = fit_tail(trajectory)(r[beyond])
    return u, bool(beyond.any())


# -- quadratic form -----------------------------------------------------------

def _derivative_term(phi, m, n, nodes):
    lo, hi = phi.active
    x, w = jc.radial_rule(lo, hi, min_nodes=nodes)
    k = m // 2
    if m % 2 == 0:
        d = jc.iterated_laplacian(phi.jet(x, 2 * k), x, n, k)[0]
    else:
        d = jc.iterated_laplacian(phi.jet(x, 2 * k + 1), x, n, k)[1]
    return jc.sphere_area(n) * float(np.sum(d**2 * x ** (n - 1) * w))


def derivative_term(phi, m, n, nodes=2048):
    """First term of the form (independent of u)."""
    if phi.kind == "zero":
        return 0.0
    return _derivative_term(phi, m, n, nodes)


def rayleigh_terms(trajectory, phi, problem=None, extend=True, nodes=2048):
    """(derivative term, potential term, extended) for the form at u."""
    problem = problem or trajectory.problem
    if phi.kind == "zero":
        return 0.0, 0.0, False
    m, n = problem.m, problem.n
    first = _derivative_term(phi, m, n, nodes)
    lo, hi = phi.support
    x, w = jc.radial_rule(lo, hi, min_nodes=nodes)
    u, extended = _u_values(trajectory, x, extend)
    with np.errstate(under="ignore"):
        second = jc.sphere_area(n) * float(np.sum(np.exp(u) * phi(x) ** 2 * x ** (n - 1) * w))
    return first, second, extended


def rayleigh_form(trajectory, phi, problem=None, extend=True, nodes=2048):
    first, second, _ = rayleigh_terms(trajectory, phi, problem, extend, nodes)
    return first - second


def instability_search(trajectory, problem=None, family=None, R_values=None, K=12,
                       extend=True):
    """Look for a negative value of the form along a cutoff family.

    ``family`` is ``"scaled_cutoff"`` (eta(x/R), R over 20 log-spaced values
    in [1, 1e3]) or ``"dyadic"`` (k = 1..K).  The default is the dyadic
    family when n = 2m and scaled cutoffs otherwise.
    """
    problem = problem or trajectory.problem
    if family is None:
        family = "dyadic" if problem.n == 2 * problem.m else "scaled_cutoff"
    if family == "scaled_cutoff":
        params = np.geomspace(1.0, 1e3, 20) if R_values is None else R_values
        members = [(float(R), tf.cutoff(R)) for R in params]
    elif family == "dyadic":
        members = [(k, tf.dyadic(k)) for k in range(1, K + 1)]
    else:
        raise ValueError(f"unknown family {family!r}")
    report = StabilityReport(Verdict.NO_WITNESS)
    for p, phi in members:
        first, second, ext = rayleigh_terms(trajectory, phi, problem, extend)
        report.extended |= ext
        value = first - second
        report.form_values.append((p, value))
        if value < 0:
            report.verdict, report.witness = Verdict.WITNESS, p
            break
    if report.extended:
        report.notes.append("u extended past the computed range by its fitted tail")
    if problem.n > 2 * problem.m and report.verdict is Verdict.NO_WITNESS:
        report.notes.append("no instability guarantee applies for n > 2m")
    return report


# -- stability outside a compact set ------------------------------------------

@dataclass(frozen=True)
class Weight:
    """V(r) = const / (r^{2m} (log r)^q)."""

    const: float
    two_m: int
    log_power: int
    case: str

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        v = self.const / r**self.two_m
        if self.log_power:
            with np.errstate(divide="ignore", invalid="ignore"):
                v = np.where(r > 1, v / np.log(r) ** self.log_power, np.nan)
        return v

    @property
    def min_radius(self):
        return 1.0 if self.log_power else 0.0


def socs_weight(problem):
    """Hardy-Rellich weight for stability outside a compact set.

    Returns a :class:`Weight`; log-weighted cases are only meaningful for r > 1.
    """
    m, n = problem.m, problem.n
    even_m, even_n = m % 2 == 0, n % 2 == 0
    if even_m:
        k = m // 2
        if even_n and 3 <= n <= 2 * m:
            return Weight(float(log_laplacian_exact(n, k)), 2 * m, m, "even m, even n <= 2m")
        if (not even_n and 3 <= n <= 2 * m) or n > 2 * m:
            return Weight(float(mu_product_exact(n, k)), 2 * m, 0, "even m, odd n <= 2m or n > 2m")
    else:
        k = (m - 1) // 2
        if n == 1:
            return Weight(float(oned_exact(k)), 2 * m, 0, "odd m, n = 1")
        if m >= 3 and even_n and 2 <= n <= 2 * m:
            return Weight(float(log_gradient_exact(n, k)), 2 * m, m + 1, "odd m, even n <= 2m")
        if (not even_n and 3 <= n <= 2 * m) or n > 2 * m:
            return Weight(float((n - 2) ** 2 / 4 * mu_product_exact(n, k)), 2 * m, 0,
                          "odd m, odd n <= 2m or n > 2m")
    raise ValueError(f"no weight case covers m={m}, n={n}")


def socs_certificate(trajectory, problem=None, min_decades=1.0):
    """Smallest sampled R with e^u <= V on every sample beyond R.

    The comparison must hold over at least ``min_decades`` of r for the
    certificate to be issued; otherwise the verdict is Inconclusive.
    """
    problem = problem or trajectory.problem
    report = StabilityReport(Verdict.INCONCLUSIVE)
    if trajectory.terminal_event is not TerminalEvent.REACHED_HORIZON:
        report.notes.append("trajectory does not reach the horizon")
        return report
    V = socs_weight(problem)
    if V.const <= 0:
        report.notes.append(f"weight vanishes identically ({V.case}); certificate degenerates")
        return report
    r = trajectory.r
    sel = r > V.min_radius
    r, u = r[sel], trajectory.u[sel]
    with np.errstate(under="ignore", over="ignore"):
        ok = np.exp(u) <= V(r)
    if not ok[-1]:
        report.notes.append("e^u exceeds V at the horizon")
        return report
    bad = np.flatnonzero(~ok)
    i = bad[-1] + 1 if bad.size else 0
    R = float(r[i])
    if r[-1] / R < 10**min_decades:
        report.notes.append(f"comparison holds only on [{R:g}, {r[-1]:g}]")
        return report
    report.verdict, report.radius = Verdict.CERTIFIED, R
    report.notes.append("pointwise e^u <= V verified on samples; weight case: " + V.case)
    return report
