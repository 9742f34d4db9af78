"""Numerical laboratory for radial solutions of (-Delta)^m u = e^u."""

from .radial_ode import (InitialConditions, IntegrationError, IntegratorConfig,
                         ProblemSpec, RadialState, TerminalEvent, Trajectory,
                         integrate, rhs, taylor_start)
from .shooting import (DomainError, Outcome, ShootingResult, Tag, classify,
                       comparison_check, phi_alpha, scan_phi_monotonicity)

__version__ = "0.1.0"

__all__ = [
    "InitialConditions", "IntegrationError", "IntegratorConfig", "ProblemSpec",
    "RadialState", "TerminalEvent", "Trajectory", "integrate", "rhs", "taylor_start",
    "DomainError", "Outcome", "ShootingResult", "Tag", "classify", "comparison_check",
    "phi_alpha", "scan_phi_monotonicity",
]
