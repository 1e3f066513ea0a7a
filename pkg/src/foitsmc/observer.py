"""Adaptive disturbance observer with non-monotone gain adaptation.

Estimate and observer state::

    d_hat  = lam (x_n - zeta)
    zeta'  = f_n + b u + d_hat - (k_hat / lam) sgn(d_tilde) - s / lam
    k_hat' = -tau k_hat + mu |s|,       k_hat(0) > 0

The true error ``d_tilde = d - d_hat`` is not measurable. Its sign is taken
from the backward difference of ``omega(t) = x_n - int(f_n + b u + d_hat)``,
whose derivative equals ``d_tilde``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .controllers import AdoGains, EqvGains
from .errors import InvalidGainsError, InvalidSplitError
from .numerics import sgn


@dataclass(frozen=True)
class AdoParams:
    lam: float = 5.0
    tau: float = 5.0
    mu: float = 2.0
    delay: float = 0.001

    def __post_init__(self) -> None:
        if not (self.lam > 0.0 and self.tau > 0.0 and self.mu > 0.0 and self.delay > 0.0):
            raise InvalidGainsError("lam, tau, mu and delay must all be positive")
        if not self.lam > 0.5:
            raise InvalidGainsError(f"lam={self.lam} must exceed 1/2")
        if not self.tau0 > 0.0:
            raise InvalidGainsError(f"tau={self.tau} must exceed mu + 1 = {self.mu + 1}")

    @property
    def tau0(self) -> float:
        return self.tau - self.mu - 1.0


@dataclass
class AdoState:
    zeta: float
    k_hat: float
    omega: float = 0.0
    # omega one delay ago; None until the first delay window has elapsed
    omega_prev: Optional[float] = None


def d_hat(p: AdoParams, x_n: float, st: AdoState) -> float:
    return p.lam * (x_n - st.zeta)


def zeta_rate(p, g: EqvGains, x, t, u, st: AdoState, sgn_dtilde, s) -> float:
    dh = d_hat(p, x[-1], st)
    return g.f_n(x, t) + g.b(x, t) * u + dh - (st.k_hat / p.lam) * sgn_dtilde - s / p.lam


def sign_d_tilde(st: AdoState) -> int:
    if st.omega_prev is None:
        return 0
    return int(sgn(st.omega - st.omega_prev))


def k_hat_rate(p: AdoParams, k_hat: float, s: float) -> float:
    return -p.tau * k_hat + p.mu * abs(s)


def theoretical_bounds(p: AdoParams, g: AdoGains, k_true: float, theta: float | None = None):
    """Decay rate ``gamma``, offset ``delta_bar`` and ultimate bound ``B``.

    ``V' <= -gamma V + delta_bar`` with ``V = (s^2 + d_tilde^2 + k_tilde^2)/2``;
    ``B = sqrt(2 delta_bar / (gamma - theta))`` bounds ``||(s, d_tilde, k_tilde)||``
    once ``V`` has entered its ball. ``theta`` defaults to ``gamma / 2``.
    """
    kappa_bar = g.kappa - 0.5 * p.mu
    lam_bar = p.lam - 0.5
    if kappa_bar <= 0.0 or lam_bar <= 0.0 or p.tau0 <= 0.0:
        raise InvalidGainsError(
            f"need kappa > mu/2, lam > 1/2, tau > mu + 1 (got {kappa_bar}, {lam_bar}, {p.tau0})"
        )
    gamma = min(kappa_bar, lam_bar, 0.5 * p.tau0)
    if theta is None:
        theta = 0.5 * gamma
    if not 0.0 < theta < gamma:
        raise InvalidSplitError(f"theta={theta} must lie in (0, gamma={gamma})")
    delta_bar = 0.5 * p.tau * k_true**2
    return gamma, delta_bar, ultimate_bound(delta_bar, gamma, theta)


def ultimate_bound(delta_bar: float, gamma: float, theta: float) -> float:
    """``B = sqrt(2 delta_bar / (gamma - theta))``."""
    if not 0.0 < theta < gamma:
        raise InvalidSplitError(f"theta={theta} must lie in (0, gamma={gamma})")
    return math.sqrt(2.0 * delta_bar / (gamma - theta))


def reaching_time_bound(V0: float, gamma: float, theta: float, delta_bar: float) -> float:
    """Upper bound on the time for ``V`` to enter the ball ``V <= delta_bar/(gamma-theta)``.

    Returns 0 when ``V0`` already lies in the ball.
    """
    if not 0.0 < theta < gamma:
        raise InvalidSplitError(f"theta={theta} must lie in (0, gamma={gamma})")
    radius = delta_bar / (gamma - theta)
    if V0 <= radius:
        return 0.0
    if delta_bar <= 0.0:
        # exponential decay to a zero-radius ball is only asymptotic
        return math.inf
    num = V0 - delta_bar / gamma
    den = delta_bar * (1.0 / (gamma - theta) - 1.0 / gamma)
    return max(0.0, math.log(num / den) / gamma)
