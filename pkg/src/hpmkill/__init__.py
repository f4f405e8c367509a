"""Closed-form engagement statistics for high-power-microwave (HPM) shots at UAVs.

The analytic chain runs kinematics -> antenna -> atmosphere -> link -> kill and
is checked against the Monte-Carlo oracle in :mod:`hpmkill.montecarlo`.
"""

from .errors import ClosureWarning, GeometryError, HPMError, InvalidArgumentError, ValidationError
from .numerics import QuadratureRule, gauss_hermite
from .scenario import EngagementSummary, Scenario, baseline_scenario, evaluate, validate

__all__ = [
    "ClosureWarning",
    "EngagementSummary",
    "GeometryError",
    "HPMError",
    "InvalidArgumentError",
    "QuadratureRule",
    "Scenario",
    "ValidationError",
    "baseline_scenario",
    "evaluate",
    "gauss_hermite",
    "validate",
]

__version__ = "0.1.0"
