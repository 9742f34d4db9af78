import math

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from polygelfand import calculus as jc

R = sympy.symbols("r", positive=True)


def sympy_derivs(expr, points, order):
    return np.array([[float(sympy.diff(expr, R, j).subs(R, p)) / math.factorial(j)
                      for p in points] for j in range(order + 1)])


@pytest.mark.parametrize("build, expr", [
    (lambda x: jc.exp(jc.mul(x, x)), sympy.exp(R**2)),
    (lambda x: jc.log(jc.affine(x[0], 6, 2.0, 1.0)), sympy.log(2 * R + 1)),
    (lambda x: jc.reciprocal(jc.affine(x[0], 6, 1.0, 3.0)), 1 / (R + 3)),
    (lambda x: jc.mul(jc.exp(-x), jc.log(x)), sympy.exp(-R) * sympy.log(R)),
])
def test_jet_arithmetic_matches_symbolic_derivatives(build, expr):
    pts = [0.5, 1.3, 2.0]
    x = jc.variable(pts, 6)
    assert np.allclose(build(x), sympy_derivs(expr, pts, 6), rtol=1e-11, atol=1e-12)


def test_affine_shifts_only_the_value():
    c = jc.affine([1.0, 2.0], 3, 2.0, -5.0)
    assert np.array_equal(c[0], [-3.0, -1.0])
    assert np.array_equal(c[1], [2.0, 2.0])
    assert not c[2:].any()


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_radial_laplacian_of_power(n):
    # Delta r^p = p (p + n - 2) r^(p-2)
    r = np.array([0.7, 1.9])
    p = 5
    a = jc.variable(r, 8)
    rp = jc.mul(jc.mul(a, a), jc.mul(jc.mul(a, a), a))
    lap = jc.radial_laplacian(rp, r, n)
    assert np.allclose(lap[0], p * (p + n - 2) * r ** (p - 2), rtol=1e-13)


def test_iterated_laplacian_against_sympy():
    n, k = 4, 2
    expr = sympy.exp(-R**2)
    v = expr
    for _ in range(k):
        v = sympy.diff(v, R, 2) + (n - 1) / R * sympy.diff(v, R)
    r = np.array([0.4, 1.1, 2.5])
    x = jc.variable(r, 2 * k)
    got = jc.iterated_laplacian(jc.exp(-jc.mul(x, x)), r, n, k)[0]
    want = [float(v.subs(R, p)) for p in r]
    assert np.allclose(got, want, rtol=1e-11)


@pytest.mark.parametrize("n, area", [(1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi),
                                     (4, 2 * math.pi**2)])
def test_sphere_area(n, area):
    assert math.isclose(jc.sphere_area(n), area, rel_tol=1e-14)


def test_radial_rule_integrates_smooth_functions():
    x, w = jc.radial_rule(0.0, 5.0)
    assert math.isclose(np.sum(w * np.exp(-x)), 1 - math.exp(-5), rel_tol=1e-13)
    x, w = jc.radial_rule(1.0, 100.0, min_nodes=256)
    assert math.isclose(np.sum(w / x), math.log(100), rel_tol=1e-13)


@given(st.floats(0.1, 10), st.floats(1.01, 50))
def test_panel_rule_exact_for_polynomials(a, ratio):
    b = a * ratio
    x, w = jc.radial_rule(a, b, min_nodes=64)
    assert math.isclose(np.sum(w * x**7), (b**8 - a**8) / 8, rel_tol=1e-12)
