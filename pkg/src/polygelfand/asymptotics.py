"""
Tail behaviour of computed trajectories and the Emden variables.

With s = log r and w(s) = u(e^s) + 2m s - log lambda_S the radial equation
becomes autonomous, Q_m(d/ds) w = lambda_S (e^w - 1); ``emden_residual``
checks that identity by finite differences on a uniform s-grid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .constants import lambda_S_exact
from .spectrum import Qm_coefficients


class Regime(str, enum.Enum):
    POWER_GROWTH_DOWN = "PowerGrowthDown"
    LOG_DECAY = "LogDecay"
    POWER_BOUND = "PowerBound"
    UNDETERMINED = "Undetermined"


def _tail(trajectory, decades=1.0):
    r = trajectory.r
    if r.size < 3 or r[-1] / r[0] < 10 ** (2 * decades) * (1 - 1e-12):
        raise ValueError(f"trajectory too short: need {2 * decades:g} decades of r, "
                         f"have {math.log10(r[-1] / r[0]):.3g}")
    return r >= r[-1] / 10**decades


def estimate_ell(trajectory):
    """Limit of Delta^{m-1} u, read off the last decade.

    Returns
    -------
    ell : float
        Mean of w_{m-1} over the window.
    spread : float
        max - min over the window.
    """
    win = _tail(trajectory)
    w = trajectory.w[win, -1]
    return float(np.mean(w)), float(np.max(w) - np.min(w))


def fit_leading_coefficient(trajectory, p):
    """Least-squares c in u(r) ~ c r^p over the last decade."""
    win = _tail(trajectory)
    return float(np.mean(trajectory.u[win] / trajectory.r[win] ** p))


def predicted_coeff(ell, m, n):
    """ell / (2^{m-1} (m-1)! prod_{l=1}^{m-1} (n + 2l - 2))."""
    den = 2 ** (m - 1) * math.factorial(m - 1)
    for l in range(1, m):
        den *= n + 2 * l - 2
    return ell / den


def power_bound_check(trajectory, K, window=None):
    """Largest C >= 0 with u(r) < -C r^K over the window (default: last decade).

    ``window`` is an (r_lo, r_hi) pair.  Returns ``(C, C > 0)``.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    r = trajectory.r
    if window is None:
        lo, hi = r[-1] / 10, r[-1]
    else:
        lo, hi = window
    sel = (r >= lo) & (r <= hi)
    if not sel.any():
        return 0.0, False
    c = max(0.0, float(np.min(-trajectory.u[sel] / r[sel] ** K)))
    return c, c > 0


@dataclass
class AsymptoticReport:
    m: int
    n: int
    ell: float | None
    ell_spread: float | None
    fitted_leading_coeff: float | None
    predicted_coeff: float | None
    log_slope: float
    regime: Regime
    regime_power: int | None = None
    notes: list = field(default_factory=list)


def analyze(trajectory):
    """Classify the tail regime of a trajectory reaching the horizon."""
    m, n = trajectory.problem.m, trajectory.problem.n
    win = _tail(trajectory)
    r, u = trajectory.r[win], trajectory.u[win]
    log_slope = float(-(u[-1] - u[0]) / math.log(r[-1] / r[0]))
    notes = []
    ell = spread = fitted = pred = None
    if trajectory.problem.even:
        ell, spread = estimate_ell(trajectory)
        fitted = fit_leading_coefficient(trajectory, 2 * m - 2)
        pred = predicted_coeff(ell, m, n)
        if ell < 0 and abs(ell) > spread and abs(fitted - pred) <= 0.02 * abs(pred):
            return AsymptoticReport(m, n, ell, spread, fitted, pred, log_slope,
                                    Regime.POWER_GROWTH_DOWN, 2 * m - 2, notes)
        if abs(ell) <= max(spread, 1e-6) and log_slope > 0:
            notes.append("consistent with logarithmic decay; the exact rate is not determined")
            return AsymptoticReport(m, n, ell, spread, fitted, pred, log_slope,
                                    Regime.LOG_DECAY, None, notes)
    for K in range(2 * m - 2, 0, -1):
        if power_bound_check(trajectory, K)[1]:
            return AsymptoticReport(m, n, ell, spread, fitted, pred, log_slope,
                                    Regime.POWER_BOUND, K, notes)
    return AsymptoticReport(m, n, ell, spread, fitted, pred, log_slope,
                            Regime.UNDETERMINED, None, notes)


@dataclass
class EmdenSamples:
    """w(s) = u(e^s) + 2m s - log lambda_S with its first s-derivative."""

    m: int
    n: int
    lambda_S: float
    s: np.ndarray
    w: np.ndarray
    dw: np.ndarray | None = None

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        if self.s.size > 1 and np.any(np.diff(self.s) <= 0):
            raise ValueError("s must be strictly increasing")
        if not (np.all(np.isfinite(self.s)) and np.all(np.isfinite(self.w))):
            raise ValueError("non-finite Emden samples")

    @property
    def uniform_step(self):
        """Grid spacing if the grid is uniform, else None."""
        if self.s.size < 2:
            return None
        d = np.diff(self.s)
        h = (self.s[-1] - self.s[0]) / (self.s.size - 1)
        return h if np.allclose(d, h, rtol=1e-9, atol=0) else None


def _lambda_S_positive(m, n):
    lam = lambda_S_exact(m, n)
    if lam <= 0:
        raise ValueError(f"Emden variables need n > 2m (got m={m}, n={n})")
    return float(lam)


def emden_transform(trajectory):
    """Map samples (r, u) to (log r, u + 2m log r - log lambda_S)."""
    m, n = trajectory.problem.m, trajectory.problem.n
    lam = _lambda_S_positive(m, n)
    r = trajectory.r
    s = np.log(r)
    w = trajectory.u + 2 * m * s - math.log(lam)
    dw = r * trajectory.du + 2 * m
    return EmdenSamples(m, n, lam, s, w, dw)


def resample_uniform(samples, h, s_min=None, s_max=None):
    """Cubic Hermite resampling onto s_min + h*i (derivatives used when present)."""
    s_min = samples.s[0] if s_min is None else max(s_min, samples.s[0])
    s_max = samples.s[-1] if s_max is None else min(s_max, samples.s[-1])
    count = int(math.floor((s_max - s_min) / h + 1e-9)) + 1
    grid = s_min + h * np.arange(count)
    if samples.dw is not None:
        spline = CubicHermiteSpline(samples.s, samples.w, samples.dw)
        w, dw = spline(grid), spline(grid, 1)
    else:
        w, dw = np.interp(grid, samples.s, samples.w), None
    return EmdenSamples(samples.m, samples.n, samples.lambda_S, grid, w, dw)


def central_weights(j):
    """Fourth-order central stencil for the j-th derivative.

    Returns integer offsets and weights (in units of h^-j), plus the
    leading truncation coefficient e such that the error is
    e * h^4 * w^(j+4) + O(h^6).
    """
    p = (j + 1) // 2 + 1
    o = np.arange(-p, p + 1, dtype=float)
    V = np.vander(o, increasing=True).T
    rhs = np.zeros(o.size)
    rhs[j] = math.factorial(j)
    a = np.linalg.solve(V, rhs)
    # exact parity: symmetric for even j, antisymmetric for odd j
    a = 0.5 * (a + (-1) ** j * a[::-1])
    err = float(a @ o ** (j + 4)) / math.factorial(j + 4)
    return o.astype(int), a, err


def emden_residual(samples, problem=None, h=None):
    """Max over the interior of |Q_m(d/ds) w - lambda_S (e^w - 1)|.

    Non-uniform samples are first resampled with step ``h`` (default 0.01).

    Returns
    -------
    residual : float
    h : float
        Grid spacing used.
    """
    m = samples.m if problem is None else problem.m
    n = samples.n if problem is None else problem.n
    lam = _lambda_S_positive(m, n)
    step = samples.uniform_step
    if step is None or (h is not None and not math.isclose(h, step)):
        samples = resample_uniform(samples, 0.01 if h is None else h)
        step = samples.uniform_step
    q = Qm_coefficients(m, n)[::-1]  # q[k] multiplies d^k/ds^k
    pmax = m + 1
    N = samples.w.size
    if N < max(4 * m + 1, 2 * pmax + 1):
        raise ValueError(f"grid too coarse: {N} points for m={m}")
    w = samples.w
    interior = slice(pmax, N - pmax)
    acc = np.zeros(N - 2 * pmax)
    for k, c in enumerate(q):
        if c == 0:
            continue
        if k == 0:
            acc += c * w[interior]
            continue
        offs, a, _ = central_weights(k)
        d = np.zeros_like(acc)
        for o, wt in zip(offs, a):
            d += wt * w[pmax + o : N - pmax + o]
        acc += c * d / step**k
    res = acc - lam * np.expm1(w[interior])
    return float(np.max(np.abs(res))), float(step)
