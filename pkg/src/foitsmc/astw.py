"""Adaptive super-twisting baseline with dead-zone gain adaptation.

    w      = -alpha |sigma|^(1/2) sgn(sigma) + v
    v'     = -(beta/2) sgn(sigma),   beta = 2 eps alpha
    alpha' = omega1 sqrt(gamma1/2) sgn(|sigma| - mu)   if alpha > alpha_m
             eta                                       otherwise

The parameter defaults are not taken from any reference run; they are the
frozen baseline used by the comparison scenarios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidGainsError
from .numerics import sgn, sig_pow


@dataclass(frozen=True)
class AstwParams:
    omega1: float = 10.0
    gamma1: float = 2.0
    eta: float = 0.01
    epsilon: float = 1.0
    mu_deadzone: float = 0.05
    alpha_m: float = 0.01

    def __post_init__(self) -> None:
        for name in ("omega1", "gamma1", "eta", "epsilon", "mu_deadzone", "alpha_m"):
            if not getattr(self, name) > 0.0:
                raise InvalidGainsError(f"{name} must be positive")


@dataclass
class AstwState:
    alpha: float = 1.0
    v: float = 0.0
    params: AstwParams = field(default_factory=AstwParams)

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise InvalidGainsError("initial alpha must be positive")

    @property
    def beta(self) -> float:
        return 2.0 * self.params.epsilon * self.alpha


def astw_output(st: AstwState, sigma: float) -> float:
    return -st.alpha * sig_pow(sigma, 0.5) + st.v


def astw_rates(st: AstwState, sigma: float) -> tuple[float, float]:
    p = st.params
    if st.alpha > p.alpha_m:
        alpha_dot = p.omega1 * math.sqrt(0.5 * p.gamma1) * sgn(abs(sigma) - p.mu_deadzone)
    else:
        alpha_dot = p.eta
    v_dot = -0.5 * st.beta * sgn(sigma)
    return alpha_dot, v_dot
