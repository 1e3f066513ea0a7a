"""Full-order integral-terminal sliding mode control with an adaptive disturbance observer.

Modules: ``numerics`` (signed powers, Routh test, RK4), ``manifold`` (sliding
surface), ``controllers``, ``observer``, ``plants``, ``spacecraft``, ``astw``
(adaptive super-twisting baseline) and the harness (``scenario``,
``simulate``, ``metrics``, ``cli``).
"""

from .errors import (
    DomainError,
    FoitsmcError,
    InvalidAlphaError,
    InvalidGainsError,
    InvalidSplitError,
    MissingBoundError,
    NumericBlowupError,
    ScenarioError,
    SingularGainError,
)
from .manifold import ManifoldSpec, default_spec
from .metrics import MetricsReport, compare, compute_metrics
from .numerics import IntegratorConfig, alpha_chain, is_hurwitz, sig_pow
from .scenario import Scenario, builtin_scenario, load_scenario, parse_scenario
from .simulate import TrajectoryRecord, run

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "FoitsmcError",
    "InvalidAlphaError",
    "InvalidGainsError",
    "InvalidSplitError",
    "IntegratorConfig",
    "ManifoldSpec",
    "MetricsReport",
    "MissingBoundError",
    "NumericBlowupError",
    "Scenario",
    "ScenarioError",
    "SingularGainError",
    "TrajectoryRecord",
    "alpha_chain",
    "builtin_scenario",
    "compare",
    "compute_metrics",
    "default_spec",
    "is_hurwitz",
    "load_scenario",
    "parse_scenario",
    "run",
    "sig_pow",
]
