import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import run
from polygelfand.radial_ode import (InitialConditions, IntegrationError, IntegratorConfig,
                                    ProblemSpec, RadialState, TerminalEvent, Trajectory,
                                    integrate, integrate_line, rhs, taylor_start)


def test_problem_spec_sign():
    assert ProblemSpec(2, 3).s_m == 1 and ProblemSpec(3, 3).s_m == -1
    with pytest.raises(ValueError):
        ProblemSpec(0, 3)
    with pytest.raises(ValueError):
        ProblemSpec(1, 0)


def test_initial_conditions_must_be_finite():
    with pytest.raises(ValueError):
        InitialConditions((0.0, math.inf))


@pytest.mark.parametrize("m, n, state, want", [
    (1, 3, RadialState(1.0, (0.0,), (0.0,)), [0, -1]),
    (2, 3, RadialState(1.0, (0.0, -1.0), (0.0, 0.0)), [0, 0, -1, 1]),
    (1, 3, RadialState(2.0, (0.0,), (1.0,)), [1, -2]),
])
def test_rhs_examples(m, n, state, want):
    assert np.allclose(rhs(ProblemSpec(m, n), state), want)


def test_rhs_rejects_origin_and_overflow():
    with pytest.raises(ValueError):
        rhs(ProblemSpec(1, 3), RadialState(0.0, (0.0,), (0.0,)))
    with pytest.raises(OverflowError, match="overflow guard"):
        rhs(ProblemSpec(1, 3), RadialState(1.0, (1e4,), (0.0,)))


def test_taylor_start_examples():
    s = taylor_start(ProblemSpec(1, 3), InitialConditions((0.0,)), 0.01)
    assert s.w[0] == pytest.approx(-1e-4 / 6, rel=1e-12)
    assert s.dw[0] == pytest.approx(-0.01 / 3, rel=1e-12)
    s = taylor_start(ProblemSpec(2, 5), InitialConditions((0.0, -1.0)), 0.01)
    assert np.allclose(s.w, [-1e-5, -1 + 1e-5], rtol=1e-12)
    assert np.allclose(s.dw, [-0.002, 0.002], rtol=1e-12)
    s = taylor_start(ProblemSpec(2, 5), InitialConditions((0.3, -1.0)), 1e-300)
    assert s.w == (0.3, -1.0) and s.dw[0] == pytest.approx(0.0)
    with pytest.raises(ValueError):
        taylor_start(ProblemSpec(1, 3), InitialConditions((0.0,)), 0.0)


def test_taylor_start_against_series_with_higher_terms():
    # m = 1: u = a - e^a r^2/(2n) + e^{2a} r^4 / (8 n (n+2)) + ...
    a, n, r0 = 0.4, 3, 1e-3
    s = taylor_start(ProblemSpec(1, n), InitialConditions((a,)), r0)
    exact = a - math.exp(a) * r0**2 / (2 * n) + math.exp(2 * a) * r0**4 / (8 * n * (n + 2))
    assert abs(s.w[0] - exact) < 1e-12


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(r0=10.0, r_max=1.0)
    with pytest.raises(ValueError):
        IntegratorConfig(rtol=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(u_overflow=math.inf)


def test_integrate_examples():
    tr = run(3, 5, (0.0, 0.0, 0.0), r_max=100.0)
    assert tr.terminal_event is TerminalEvent.REACHED_HORIZON and tr.r[-1] == 100.0
    tr = run(2, 5, (0.0, 0.0))
    assert tr.terminal_event is TerminalEvent.FLUX_SIGN_EVENT and tr.r_event == 1e-6
    tr = run(2, 5, (0.0, -100.0))
    assert tr.terminal_event is TerminalEvent.REACHED_HORIZON
    assert np.all(tr.w[:, 1] < 0)


def test_low_dimension_blow_up_uses_overflow_guard():
    tr = integrate(ProblemSpec(2, 2), InitialConditions((0.0, -5.0)),
                   IntegratorConfig(r_max=1e8, samples_per_decade=10))
    assert tr.terminal_event is TerminalEvent.OVERFLOW_GUARD
    assert tr.u[-1] == pytest.approx(50.0)


def test_trajectory_structure():
    tr = run(2, 5, (0.0, -100.0))
    assert tr.r[0] == 1e-6 and np.all(np.diff(tr.r) > 0)
    assert tr.w.shape == tr.dw.shape == (len(tr), 2)
    with pytest.raises(ValueError):
        tr.w[0, 0] = 1.0
    with pytest.raises(ValueError):
        Trajectory(tr.problem, tr.ic, tr.r[::-1], tr.w, tr.dw, tr.terminal_event)


def test_u_at_interpolates_and_extends_below():
    tr = run(2, 5, (0.0, -100.0))
    mid = np.sqrt(tr.r[100] * tr.r[101])
    assert tr.u_at(np.array([tr.r[100]]))[0] == tr.u[100]
    assert np.isnan(tr.u_at(np.array([2e4]))[0])
    assert tr.u_at(np.array([0.0]))[0] == 0.0
    assert tr.u_at(np.array([mid]))[0] == pytest.approx(-100 * mid**2 / 10, rel=1e-6)


def test_integration_failure_is_reported(monkeypatch):
    import polygelfand.radial_ode as ro

    def broken(problem):
        def f(r, y):
            return np.full_like(y, np.nan) if r > 1.0 else np.zeros_like(y)
        return f

    monkeypatch.setattr(ro, "_system", broken)
    with pytest.raises(IntegrationError) as err:
        integrate(ProblemSpec(1, 3), InitialConditions((0.0,)), IntegratorConfig(r_max=10.0))
    assert err.value.last_state is not None


# invariants

ics = st.tuples(st.floats(-2, 2), st.floats(-5, 0), st.floats(-5, 5), st.floats(-5, 5))


@settings(max_examples=15)
@given(st.sampled_from([(1, 3), (2, 3), (2, 5), (3, 5), (4, 9)]), ics)
def test_flux_is_monotone(mn, data):
    m, n = mn
    tr = integrate(ProblemSpec(m, n), InitialConditions(data[:m]), IntegratorConfig(r_max=50.0))
    f = tr.flux()
    d = np.diff(f) * (1 if m % 2 == 0 else -1)
    # mixed tolerance: the absolute part of the step control is scaled by r^(n-1)
    cfg = tr.config
    slack = 10 * (cfg.rtol * np.abs(f[1:]) + cfg.atol * tr.r[1:] ** (n - 1))
    assert np.all(d >= -slack)


@settings(max_examples=10)
@given(st.sampled_from([1, 3, 5]), ics)
def test_odd_m_last_derivative_negative(n, data):
    tr = integrate(ProblemSpec(3, n), InitialConditions(data[:3]), IntegratorConfig(r_max=50.0))
    assert np.all(tr.dw[1:, -1] < 0)


@settings(max_examples=8)
@given(st.sampled_from([(1, 3), (2, 5), (3, 5)]), ics, st.sampled_from([0.5, 2.0]))
def test_scaling_covariance(mn, data, lam):
    m, n = mn
    ic = InitialConditions(data[:m])
    cfg = IntegratorConfig(r_max=20.0)
    base = integrate(ProblemSpec(m, n), ic, cfg)
    scaled = integrate(ProblemSpec(m, n), ic.scaled(lam, m), cfg)
    r = scaled.r[(scaled.r * lam <= base.r[-1]) & (scaled.r > 1e-3)]
    if r.size == 0:
        return
    want = base.u_at(lam * r) + 2 * m * math.log(lam)
    got = scaled.u_at(r)
    assert np.all(np.abs(got - want) <= 100 * cfg.rtol * np.maximum(1, np.abs(want)) + 1e-8)


def test_step_halving_convergence():
    ic = InitialConditions((0.0, -3.0))
    coarse = integrate(ProblemSpec(2, 5), ic, IntegratorConfig(rtol=1e-8, atol=1e-10, r_max=100))
    fine = integrate(ProblemSpec(2, 5), ic, IntegratorConfig(rtol=5e-9, atol=5e-11, r_max=100))
    ref = integrate(ProblemSpec(2, 5), ic, IntegratorConfig(rtol=1e-13, atol=1e-15, r_max=100))
    e_coarse = abs(coarse.u[-1] - ref.u[-1])
    e_fine = abs(fine.u[-1] - ref.u[-1])
    assert abs(fine.u[-1] - coarse.u[-1]) <= max(e_coarse, 1e-8 * abs(ref.u[-1]))
    assert e_fine <= 1e-8 * abs(ref.u[-1])


def test_line_solution_both_directions():
    data = [0.0, 1.0, 0, 0, 0, 0]
    fwd = integrate_line(3, data, 100.0)
    bwd = integrate_line(3, data, 100.0, direction=-1)
    assert fwd.reached and bwd.reached
    assert fwd.x[-1] == 100.0 and bwd.x[-1] == -100.0
    # near 0, u(x) ~ x on both sides
    assert fwd.derivs[0, 1] == 1.0 and bwd.derivs[0, 1] == -1.0
    with pytest.raises(ValueError):
        integrate_line(3, [0.0], 1.0)
