import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from polygelfand import constants as K
from polygelfand.testfunctions import bump, zero

Q = sympy.Rational


def A_oracle(n, k):
    return sympy.prod([Q(n - 4 * k + 4 * i) ** 2 * Q(n + 4 * k - 4 * i - 4) ** 2
                       for i in range(k)]) / 16**k


def mu_oracle(n, alpha):
    g = Q(n - 2, 2) ** 2 - (Q(alpha) - 2) ** 2 / 4
    vals = [abs(g + j * (n - 2 + j)) ** 2 for j in range(0, 400)]
    best = min(vals)
    return best, vals.index(best)


# examples

def test_A_B_examples():
    assert K.A_const(13, 1) == 855.5625
    assert K.B_const(10, 0) == 16.0
    assert K.A_const(18, 2) == 12006225.0
    assert K.A_exact(18, 2) == 12006225


def test_gamma_mu_examples():
    assert K.gamma(5, 0) == 1.25
    assert K.mu(5, 0) == (25 / 16, 0)
    assert K.mu(4, 0) == (0.0, 0)
    assert K.gamma_bar(2, 0) == 1.0


def test_hr_product_examples():
    assert K.hr_product_exact(5, 1) == (Fraction(25, 16), "power")
    assert K.hr_product_exact(2, 1) == (Fraction(1, 2), "log")
    assert K.hr_product_exact(4, 1)[1] == "log"


def test_oned_examples():
    assert K.oned_constant(0) == 0.0
    assert K.oned_constant(1) == 3.515625
    assert K.oned_exact(2) == Fraction(225, 1024)


def test_lambda_S_examples():
    assert K.lambda_S(1, 3) == 2
    assert K.lambda_S(2, 13) == 792
    assert K.lambda_S(1, 10) == K.B_const(10, 0) == 16


def test_supersolution_examples():
    C, lam = K.supersolution_constants(2, 5)
    assert C == -0.125
    assert K.supersolution_radius(2, 5) == pytest.approx(24.0)
    assert lam == pytest.approx(math.exp(3) / 24**3, rel=1e-12)
    assert K.supersolution_constants(2, 4)[0] == pytest.approx(-1 / 3)
    with pytest.raises(NotImplementedError):
        K.supersolution_constants(2, 3)
    with pytest.raises(ValueError):
        K.supersolution_constants(3, 5)


@pytest.mark.parametrize("m, n", [(2, 4), (2, 7), (4, 6), (4, 11), (6, 9)])
def test_supersolution_lambda_is_the_minimum(m, n):
    C, lam = K.supersolution_constants(m, n)
    assert C < 0
    p = 2 * m - 3
    f = lambda logr: abs(C) * math.exp(p * logr) - 3 * logr
    best = minimize_scalar(f, bounds=(-5, 10), method="bounded", options={"xatol": 1e-12})
    assert lam == pytest.approx(math.exp(best.fun), rel=1e-9)


# oracles and invariants

@given(st.integers(1, 40), st.integers(0, 4))
def test_A_matches_oracle(n, k):
    assert K.A_exact(n, k) == A_oracle(n, k)


@given(st.integers(2, 40), st.integers(-20, 10))
def test_mu_matches_bruteforce(n, alpha):
    value, j = K.mu_exact(n, alpha)
    want, j_want = mu_oracle(n, alpha)
    assert value == want and j == j_want
    assert value >= 0


@pytest.mark.parametrize("n", range(5, 41))
def test_mu_equals_A1(n):
    assert K.mu_exact(n, 0)[0] == K.A_exact(n, 1) == Fraction(n**2 * (n - 4) ** 2, 16)


@pytest.mark.parametrize("ell", range(1, 8))
@pytest.mark.parametrize("k", range(1, 6))
def test_mu_zero_pattern_in_even_dimension(ell, k):
    n = 2 * ell
    for i in range(1, k + 1):
        value, j = K.mu_exact(n, -4 * k + 4 * i)
        expected_zero = i <= min(k, k + 1 - ell / 2)
        assert (value == 0) == expected_zero
        if expected_zero:
            assert j == 2 * k - ell - 2 * (i - 1)


@given(st.integers(1, 6), st.integers(1, 40))
def test_lambda_S_sign(m, n):
    lam = K.lambda_S_exact(m, n)
    if n > 2 * m:
        assert lam > 0
    if n == 2 * m:
        assert lam == 0


def test_gamma_bar_positive_except_degenerate():
    assert K.gamma_bar(2, 2) == 0
    assert all(K.gamma_bar(n, a) > 0 for n in range(2, 10) for a in range(-8, 1))


def test_constants_table_contents():
    t = K.constants_table(13, 1, m=2)
    assert t.A == 855.5625 and t.A_valid
    assert t.lambda_S == 792
    assert t.C_nm < 0
    t0 = K.constants_table(5, 0)
    assert t0.oned == 0 and t0.notes


# quadrature verification

def test_zero_test_function():
    assert K.verify_hr_inequality(K.HRQuery(5, 1), "laplacian", zero()) == (0.0, 0.0, 0.0)


def test_support_must_avoid_the_inner_ball():
    with pytest.raises(ValueError):
        K.verify_hr_inequality(K.HRQuery(5, 1), "laplacian", bump(0.5, 2.0))


def test_laplacian_example_margin():
    lhs, rhs, margin = K.verify_hr_inequality(K.HRQuery(5, 1), "laplacian", bump(2, 8))
    assert lhs > 0 and rhs > 0 and margin >= 0


def test_log_variant_example_margin():
    R = math.e**2
    _, rhs, margin = K.verify_hr_inequality(K.HRQuery(2, 1), "log_laplacian",
                                            bump(R + 1, 4 * (R + 1)), R=R)
    assert margin >= -1e-10 * rhs


def test_quadrature_against_independent_integration():
    # lhs of the n = 5, k = 1 inequality by adaptive quadrature
    from scipy.integrate import quad
    phi = bump(2, 8)
    lhs, _, _ = K.verify_hr_inequality(K.HRQuery(5, 1), "laplacian", phi)
    f = lambda r: float(phi(np.array([r]))[0]) ** 2 / r**4 * r**4
    ref = quad(f, 2, 8, epsabs=0, epsrel=1e-12, limit=200)[0] * 8 * math.pi**2 / 3
    assert lhs == pytest.approx(ref, rel=1e-10)


VARIANT_CASES = [
    ("laplacian", K.HRQuery(5, 1), 1.0),
    ("laplacian", K.HRQuery(11, 2), 1.0),
    ("gradient", K.HRQuery(7, 1), 1.0),
    ("log_second_order", K.HRQuery(4, 1, 0.0, 0.0), math.e**2),
    ("log_laplacian", K.HRQuery(2, 1), math.e**2),
    ("log_gradient", K.HRQuery(4, 1), math.e**2),
    ("oned", K.HRQuery(1, 1), 1.0),
]


@pytest.mark.parametrize("variant, query, R", VARIANT_CASES)
@given(lo=st.floats(1.0, 3.0), width=st.floats(1.2, 4.0), amp=st.floats(0.1, 10))
def test_random_bumps_satisfy_inequality(variant, query, R, lo, width, amp):
    a = (R + 1) * lo
    _, rhs, margin = K.verify_hr_inequality(query, variant, bump(a, a * width, amp), R=R)
    assert margin >= -1e-10 * rhs
