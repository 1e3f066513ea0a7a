"""Full-order integral-terminal sliding manifold.

The sliding variable is ``s = x_n - z`` where the integrator state ``z`` obeys

    z' = -sum_i C_i |x_i|^a_i sgn(x_i),      z(0) = x_n(0),

so ``s(0) = 0`` and there is no reaching phase. While ``s`` is held at zero the
chain evolves along :func:`reduced_dynamics`, which reaches the origin in finite
time when ``p^n + C_n p^(n-1) + ... + C_1`` is Hurwitz and the exponents come
from :func:`~foitsmc.numerics.alpha_chain`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError, InvalidAlphaError, InvalidGainsError
from .numerics import alpha_chain, is_hurwitz, sig_pow


@dataclass(frozen=True)
class ManifoldSpec:
    """Coefficients ``C = (C_1..C_n)`` and exponents ``alphas = (a_1..a_n)``.

    Validation is eager: a non-Hurwitz coefficient set or an exponent vector
    inconsistent with the recursion fails at construction.
    """

    C: tuple[float, ...]
    alphas: tuple[float, ...]

    def __post_init__(self) -> None:
        C = tuple(float(c) for c in self.C)
        alphas = tuple(float(a) for a in self.alphas)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "alphas", alphas)
        if len(C) < 1 or len(C) != len(alphas):
            raise DomainError(f"need matching C and alphas of length >= 1, got {len(C)} and {len(alphas)}")
        if any(c <= 0.0 for c in C):
            raise InvalidGainsError(f"manifold coefficients must be positive: {C}")
        if not is_hurwitz([1.0, *C[::-1]]):
            raise InvalidGainsError(f"characteristic polynomial for C={C} is not Hurwitz")
        expected = alpha_chain(len(C), alphas[-1])
        if any(abs(a - b) > 1e-12 for a, b in zip(alphas, expected)):
            raise InvalidAlphaError(f"exponents {alphas} do not follow the recursion (expected {expected})")

    @property
    def n(self) -> int:
        return len(self.C)

    @classmethod
    def from_alpha(cls, C: Sequence[float], alpha: float) -> "ManifoldSpec":
        return cls(tuple(C), tuple(alpha_chain(len(C), alpha)))


def default_spec() -> ManifoldSpec:
    """Third-order surface with poles at -2, -5, -8 and a_3 = 7/10."""
    return ManifoldSpec.from_alpha((80.0, 66.0, 15.0), Fraction(7, 10))


@dataclass
class ManifoldState:
    z: float

    def s(self, x: Sequence[float]) -> float:
        return x[-1] - self.z


def _check_dim(spec: ManifoldSpec, x: Sequence[float]) -> None:
    if len(x) != spec.n:
        raise DomainError(f"state has {len(x)} components, manifold order is {spec.n}")


def manifold_init(spec: ManifoldSpec, x0: Sequence[float]) -> ManifoldState:
    _check_dim(spec, x0)
    return ManifoldState(z=float(x0[-1]))


def z_rate(spec: ManifoldSpec, x: Sequence[float]) -> float:
    _check_dim(spec, x)
    total = 0.0
    for c, a, xi in zip(spec.C, spec.alphas, x):
        total -= c * sig_pow(float(xi), a)
    return total


def sliding_value(spec: ManifoldSpec, x: Sequence[float], st: ManifoldState) -> float:
    _check_dim(spec, x)
    return float(x[-1]) - st.z


def reduced_dynamics(spec: ManifoldSpec, x: Sequence[float]) -> np.ndarray:
    """Chain dynamics with the sliding constraint ``s = 0`` enforced exactly."""
    _check_dim(spec, x)
    out = np.empty(spec.n)
    out[:-1] = np.asarray(x, dtype=float)[1:]
    out[-1] = z_rate(spec, x)
    return out
