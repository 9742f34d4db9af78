import math
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from polygelfand.radial_ode import InitialConditions, IntegratorConfig, ProblemSpec, integrate
from polygelfand.shooting import phi_alpha

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@lru_cache(maxsize=None)
def phi(n, alpha=0.0, beta_prime=(), tol=1e-6):
    return phi_alpha(n, alpha, beta_prime, tol)


@lru_cache(maxsize=None)
def run(m, n, ic, r_max=1e4):
    return integrate(ProblemSpec(m, n), InitialConditions(ic), IntegratorConfig(r_max=r_max))


@lru_cache(maxsize=None)
def interior(m, n, offset=5.0):
    """Global trajectory with beta_{m-1} = Phi_0 - offset and the other data 0."""
    res = phi(n, 0.0, (0.0,) * (m - 2))
    return run(m, n, (0.0, *(0.0,) * (m - 2), res.phi_estimate - offset))


EXPLICIT_ALPHA_M2 = 4 * math.log(2) + math.log(24)


@pytest.fixture
def record_acceptance():
    def record(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} {label}" + (f" :: {detail}" if detail else "")
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok
    return record
