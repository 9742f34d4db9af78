"""
Radial Cauchy problem for (-Delta)^m u = e^u as a first-order system.

The state at radius r is (w_0, ..., w_{m-1}, w_0', ..., w_{m-1}') with
w_k = Delta^k u.  Using Delta v = v'' + (n-1)/r v' for radial v,

    w_k'' = f_k - (n - 1)/r w_k',   f_k = w_{k+1} (k < m-1),
    f_{m-1} = (-1)^m exp(w_0).

The system is singular at r = 0; integration starts at a small offset r0
from the second-order Taylor state.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

logger = logging.getLogger(__name__)

EXP_CAP = 700.0


class IntegrationError(RuntimeError):
    """Step-size underflow or a non-finite state during integration."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


@dataclass(frozen=True)
class ProblemSpec:
    m: int
    n: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be an integer >= 1, got {self.m}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n}")

    @property
    def s_m(self):
        return 1 if self.m % 2 == 0 else -1

    @property
    def even(self):
        return self.m % 2 == 0

    @property
    def flux_event_armed(self):
        return self.even and self.n >= 3


@dataclass(frozen=True)
class InitialConditions:
    """alpha_k = Delta^k u(0), k = 0..m-1."""

    alpha: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in self.alpha)
        if not all(math.isfinite(x) for x in a):
            raise ValueError("initial values must be finite")
        object.__setattr__(self, "alpha", a)

    def __len__(self):
        return len(self.alpha)

    @classmethod
    def from_alpha_beta(cls, alpha, beta):
        return cls((alpha, *beta))

    def scaled(self, lam, m):
        """Initial data of u(lam r) + 2m log(lam)."""
        a = self.alpha
        return InitialConditions((a[0] + 2 * m * math.log(lam),
                                  *(lam ** (2 * k) * a[k] for k in range(1, len(a)))))


@dataclass(frozen=True)
class RadialState:
    r: float
    w: tuple
    dw: tuple

    @property
    def vector(self):
        return np.array(self.w + self.dw)

    @classmethod
    def from_vector(cls, r, y):
        m = len(y) // 2
        return cls(float(r), tuple(float(v) for v in y[:m]), tuple(float(v) for v in y[m:]))


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    r0: float = 1e-6
    r_max: float = 1e4
    u_overflow: float = 50.0
    samples_per_decade: int = 400

    def __post_init__(self):
        if not 0 < self.r0 < self.r_max:
            raise ValueError("need 0 < r0 < r_max")
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")
        if not math.isfinite(self.u_overflow):
            raise ValueError("u_overflow must be finite")
        if self.samples_per_decade < 0:
            raise ValueError("samples_per_decade must be >= 0")

    def replace(self, **kw):
        return IntegratorConfig(**{**self.__dict__, **kw})


class TerminalEvent(str, enum.Enum):
    REACHED_HORIZON = "ReachedHorizon"
    OVERFLOW_GUARD = "OverflowGuard"
    FLUX_SIGN_EVENT = "FluxSignEvent"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution; arrays are read-only.

    ``r`` has shape (N,), ``w`` and ``dw`` have shape (N, m).
    """

    problem: ProblemSpec
    ic: InitialConditions
    r: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    terminal_event: TerminalEvent
    r_event: float | None = None
    config: IntegratorConfig = field(default_factory=IntegratorConfig)
    source: str = "integrate"

    def __post_init__(self):
        for name in ("r", "w", "dw"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.w.ndim != 2 or self.w.shape != self.dw.shape or self.w.shape[0] != self.r.size:
            raise ValueError("inconsistent trajectory array shapes")
        if self.r.size > 1 and np.any(np.diff(self.r) <= 0):
            raise ValueError("sample radii must be strictly increasing")

    def __len__(self):
        return self.r.size

    @property
    def u(self):
        return self.w[:, 0]

    @property
    def du(self):
        return self.dw[:, 0]

    def state(self, i):
        return RadialState(float(self.r[i]), tuple(self.w[i]), tuple(self.dw[i]))

    @property
    def terminal(self):
        return self.state(-1)

    def __iter__(self):
        return (self.state(i) for i in range(len(self)))

    def flux(self):
        """r^{n-1} (Delta^{m-1} u)'(r) at the samples."""
        return self.r ** (self.problem.n - 1) * self.dw[:, -1]

    def u_at(self, r):
        """Hermite interpolation of u inside the sampled range.

        Below the first sample the Taylor expansion at the origin is used;
        beyond the last sample NaN is returned.
        """
        r = np.asarray(r, dtype=float)
        out = np.full(r.shape, np.nan)
        if len(self) >= 2:
            spline = CubicHermiteSpline(self.r, self.u, self.du)
            inside = (r >= self.r[0]) & (r <= self.r[-1])
            out[inside] = spline(r[inside])
        below = r < self.r[0]
        if below.any():
            a = self.ic.alpha
            m, n = self.problem.m, self.problem.n
            f0 = a[1] if m > 1 else self.problem.s_m * math.exp(a[0])
            out[below] = a[0] + f0 * r[below] ** 2 / (2 * n)
        if len(self) == 1:
            out[r == self.r[0]] = self.u[0]
        return out


def _forcing(problem, w):
    m = problem.m
    f = np.empty(m)
    f[: m - 1] = w[1:]
    f[m - 1] = problem.s_m * math.exp(w[0])
    return f


def rhs(problem, state):
    """Derivative of the 2m-vector (w, w') at state.r > 0."""
    if state.r <= 0:
        raise ValueError("rhs requires r > 0; use taylor_start near the origin")
    w = np.asarray(state.w, dtype=float)
    dw = np.asarray(state.dw, dtype=float)
    try:
        f = _forcing(problem, w)
    except OverflowError as exc:
        raise OverflowError(
            f"exp(u) overflow at u={w[0]:g}; the overflow guard should have stopped "
            "integration earlier") from exc
    return np.concatenate([dw, f - (problem.n - 1) / state.r * dw])


def _system(problem):
    m, n, s = problem.m, problem.n, problem.s_m
    nm1 = n - 1

    def f(r, y):
        out = np.empty(2 * m)
        out[:m] = y[m:]
        out[m : 2 * m - 1] = y[1:m]
        out[2 * m - 1] = s * math.exp(min(y[0], EXP_CAP))
        out[m:] -= nm1 / r * y[m:]
        return out

    return f


def taylor_start(problem, ic, r0):
    """Second-order Taylor state at r0 from the data at the origin.

    w_k(r0) = alpha_k + f_k r0^2 / (2n),  w_k'(r0) = f_k r0 / n.
    """
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    if len(ic) != problem.m:
        raise ValueError(f"expected {problem.m} initial values, got {len(ic)}")
    a = np.asarray(ic.alpha, dtype=float)
    f = _forcing(problem, a)
    n = problem.n
    return RadialState.from_vector(r0, np.concatenate([a + f * r0**2 / (2 * n), f * r0 / n]))


def log_grid(r0, r_max, per_decade):
    """r0 * 10^(i/per_decade) below r_max; anchored at r0 so grids are shared."""
    if per_decade == 0:
        return np.array([r0])
    count = int(math.floor(per_decade * math.log10(r_max / r0) + 1e-9)) + 1
    grid = r0 * 10.0 ** (np.arange(count) / per_decade)
    return grid[grid < r_max]


def integrate(problem, ic, config=None):
    """Integrate the radial Cauchy problem from r0 toward r_max.

    Stops at the horizon, when u exceeds ``config.u_overflow``, or (m even,
    n >= 3) when Delta^{m-1} u becomes nonnegative.

    Raises
    ------
    IntegrationError
        On step-size underflow or a non-finite state.
    """
    config = config or IntegratorConfig()
    m = problem.m
    start = taylor_start(problem, ic, config.r0)
    y0 = start.vector

    def finish(r, w, dw, event, r_event=None):
        return Trajectory(problem, ic, r, w, dw, event, r_event, config)

    if problem.flux_event_armed and y0[m - 1] >= 0:
        return finish([start.r], [y0[:m]], [y0[m:]], TerminalEvent.FLUX_SIGN_EVENT, start.r)
    if y0[0] > config.u_overflow:
        return finish([start.r], [y0[:m]], [y0[m:]], TerminalEvent.OVERFLOW_GUARD, start.r)

    def overflow(r, y):
        return y[0] - config.u_overflow

    overflow.terminal = True
    overflow.direction = 1
    events = [overflow]
    if problem.flux_event_armed:
        def flux_sign(r, y):
            return y[m - 1]

        flux_sign.terminal = True
        flux_sign.direction = 1
        events.append(flux_sign)

    grid = log_grid(config.r0, config.r_max, config.samples_per_decade)
    t_eval = np.append(grid, config.r_max)
    # trial stages past the blow-up radius overflow; those steps are rejected.
    # The automatic first step is far too long next to the 1/r term and
    # spoils the dense output there, so start at r0 / 10.
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(_system(problem), (config.r0, config.r_max), y0, method="DOP853",
                        t_eval=t_eval, events=events, rtol=config.rtol, atol=config.atol,
                        first_step=0.1 * config.r0)

    r, y = sol.t, sol.y.T
    if sol.status == -1:
        last = RadialState.from_vector(r[-1], y[-1]) if r.size else start
        raise IntegrationError(f"integration failed: {sol.message}", last)
    if not np.all(np.isfinite(y)):
        bad = np.argmax(~np.all(np.isfinite(y), axis=1))
        last = RadialState.from_vector(r[bad - 1], y[bad - 1]) if bad else start
        raise IntegrationError("non-finite state encountered", last)

    event, r_event = TerminalEvent.REACHED_HORIZON, None
    hits = [(te[0], ye[0], i) for i, (te, ye) in enumerate(zip(sol.t_events, sol.y_events))
            if te.size]
    if hits:
        t_hit, y_hit, which = min(hits, key=lambda h: h[0])
        event = TerminalEvent.OVERFLOW_GUARD if which == 0 else TerminalEvent.FLUX_SIGN_EVENT
        r_event = float(t_hit)
        keep = r < t_hit
        r, y = np.append(r[keep], t_hit), np.vstack([y[keep], y_hit])
    if r.size == 0 or r[0] != config.r0:
        r, y = np.insert(r, 0, config.r0), np.vstack([y0, y])
    logger.debug("integrate m=%d n=%d ic=%s -> %s at r=%.6g (%d rhs evals)",
                 problem.m, problem.n, ic.alpha, event.value, r[-1], sol.nfev)
    return finish(r, y[:, :m], y[:, m:], event, r_event)


@dataclass(frozen=True, eq=False)
class LineSolution:
    """Solution of (-1)^m u^(2m) = e^u on the half line x >= 0."""

    m: int
    x: np.ndarray
    derivs: np.ndarray
    reached: bool
    message: str


def integrate_line(m, derivs0, x_max, config=None, direction=1):
    """One-dimensional Cauchy problem with arbitrary (nonsymmetric) data.

    ``derivs0`` holds u^(k)(0), k = 0..2m-1.  ``direction=-1`` integrates
    toward negative x by reflecting x -> -x, which flips the sign of the odd
    derivatives and leaves the (even-order) equation unchanged.
    """
    config = config or IntegratorConfig()
    d = np.asarray(derivs0, dtype=float)
    if d.size != 2 * m:
        raise ValueError(f"need {2 * m} initial derivatives")
    if direction == -1:
        d = d * (-1.0) ** np.arange(2 * m)
    sign = -1.0 if m % 2 else 1.0

    def f(x, y):
        out = np.empty_like(y)
        out[:-1] = y[1:]
        out[-1] = sign * math.exp(min(y[0], EXP_CAP))
        return out

    def overflow(x, y):
        return y[0] - config.u_overflow

    overflow.terminal = True
    overflow.direction = 1
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(f, (0.0, x_max), d, method="DOP853", events=[overflow],
                        rtol=config.rtol, atol=config.atol)
    if sol.status == -1:
        raise IntegrationError(f"integration failed: {sol.message}")
    reached = sol.status == 0 and sol.t[-1] == x_max
    return LineSolution(m, direction * sol.t, sol.y.T, reached, sol.message)
