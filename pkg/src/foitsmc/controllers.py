"""Control laws built on the integral-terminal manifold.

The total input is ``u = b^-1 (u_eqv + inner)`` where ``u_eqv`` cancels the
nominal drift and the manifold terms in ``s'``, and ``inner`` is one of

* :func:`u_dis`   -- discontinuous switching term with known bounds,
* :func:`stc_output` -- continuous super-twisting term (state ``v``),
* :func:`u_ado`   -- linear (optionally root-augmented) term fed by the
  adaptive disturbance observer estimate ``d_hat``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InvalidGainsError, SingularGainError
from .manifold import ManifoldSpec, z_rate
from .numerics import sgn, sig_pow

StateFn = Callable[[Sequence[float], float], float]


def zero_fn(x, t) -> float:
    return 0.0


def unit_fn(x, t) -> float:
    return 1.0


@dataclass(frozen=True)
class EqvGains:
    spec: ManifoldSpec
    f_n: StateFn = zero_fn
    b: StateFn = unit_fn


@dataclass(frozen=True)
class DisGains:
    eta: float
    d_max: float = 0.0
    f_max: float = 0.0

    def __post_init__(self) -> None:
        if not self.eta > 0.0:
            raise InvalidGainsError(f"eta must be positive, got {self.eta}")
        if self.d_max < 0.0 or self.f_max < 0.0:
            raise InvalidGainsError("d_max and f_max must be non-negative")

    @property
    def switching_gain(self) -> float:
        return self.eta + self.d_max + self.f_max


@dataclass(frozen=True)
class StcGains:
    k1: float = 3.96
    k2: float = 7.7

    def __post_init__(self) -> None:
        if not (self.k1 > 0.0 and self.k2 > 0.0):
            raise InvalidGainsError(f"super-twisting gains must be positive: {self.k1}, {self.k2}")

    @classmethod
    def from_rho(cls, rho: float) -> "StcGains":
        """Gains ``1.5 sqrt(rho)`` and ``1.1 rho`` for a disturbance with ``|d'| <= rho``."""
        if not rho > 0.0:
            raise InvalidGainsError(f"rho must be positive, got {rho}")
        return cls(k1=1.5 * math.sqrt(rho), k2=1.1 * rho)


@dataclass
class StcState:
    gains: StcGains
    v: float = 0.0


@dataclass(frozen=True)
class AdoGains:
    """Linear sliding gain ``kappa``; ``kappa2 > 0`` selects the fast variant."""

    kappa: float = 5.0
    kappa2: float = 0.0

    def __post_init__(self) -> None:
        if not self.kappa > 0.0:
            raise InvalidGainsError(f"kappa must be positive, got {self.kappa}")
        if self.kappa2 < 0.0:
            raise InvalidGainsError(f"kappa2 must be non-negative, got {self.kappa2}")


def u_eqv(g: EqvGains, x: Sequence[float], t: float) -> float:
    """``-f_n(x, t) - sum_i C_i sig_pow(x_i, a_i)``."""
    return -g.f_n(x, t) + z_rate(g.spec, x)


def u_dis(g: DisGains, s: float) -> float:
    return -g.switching_gain * sgn(s)


def stc_output(st: StcState, s: float) -> float:
    return -st.gains.k1 * sig_pow(s, 0.5) + st.v


def stc_v_rate(st: StcState, s: float) -> float:
    return -st.gains.k2 * sgn(s)


def u_ado(g: AdoGains, s: float, d_hat: float) -> float:
    # the fast variant keeps the -d_hat feedforward
    out = -g.kappa * s - d_hat
    if g.kappa2:
        out -= g.kappa2 * sig_pow(s, 0.5)
    return out


def total_control(g: EqvGains, inner: float, x: Sequence[float], t: float) -> float:
    b = g.b(x, t)
    if not abs(b) >= 1e-12:
        raise SingularGainError(f"input gain b(x, t) = {b!r} is singular at t={t}")
    return (u_eqv(g, x, t) + inner) / b


def check_ado_gains(g: AdoGains, mu: float) -> None:
    """Positivity of ``kappa - mu/2`` (or ``kappa1 - mu/2`` for the fast law)."""
    if not g.kappa > 0.5 * mu:
        raise InvalidGainsError(f"kappa={g.kappa} must exceed mu/2={0.5 * mu}")
