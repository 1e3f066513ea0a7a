"""Scalar/vector primitives and the fixed-step integrator used by every simulation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InvalidAlphaError, NumericBlowupError

VectorField = Callable[[float, np.ndarray], np.ndarray]

METHODS = ("rk4", "euler")


def sgn(x: float) -> float:
    # sgn(0) = 0
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


def sig_pow(x: float, alpha: float) -> float:
    """Signed power ``|x|**alpha * sgn(x)``.

    Odd and continuous at the origin for every ``alpha > 0``.
    """
    if not alpha > 0.0:
        raise DomainError(f"exponent must be positive, got {alpha!r}")
    if x > 0.0:
        return x**alpha
    if x < 0.0:
        return -((-x) ** alpha)
    return 0.0


def sig_pow_vec(x: Sequence[float], alpha: Sequence[float] | float) -> np.ndarray:
    """Componentwise :func:`sig_pow`.

    ``alpha`` may be a scalar, in which case it is applied to every component.
    """
    x = np.asarray(x, dtype=float)
    if np.ndim(alpha) == 0:
        alpha = np.full(x.shape, float(alpha))
    else:
        alpha = np.asarray(alpha, dtype=float)
    if x.shape != alpha.shape:
        raise DomainError(f"dimension mismatch: {x.shape} vs {alpha.shape}")
    if np.any(alpha <= 0.0):
        raise DomainError("exponents must be positive")
    return np.sign(x) * np.abs(x) ** alpha


def alpha_chain(n: int, alpha, exact: bool = False) -> list:
    """Terminal exponents (a_1, ..., a_n) generated from ``a_n = alpha``.

    Runs the descending recursion ``a_{i-1} = a_i a_{i+1} / (2 a_{i+1} - a_i)``
    with ``a_{n+1} = 1``. Pass a :class:`fractions.Fraction` together with
    ``exact=True`` to get rational results, e.g. ``alpha_chain(3, Fraction(7, 10),
    exact=True) == [7/16, 7/13, 7/10]``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"order must be an integer >= 1, got {n!r}")
    one = Fraction(1) if exact else 1.0
    a = Fraction(alpha) if exact else float(alpha)
    if not 0 < a < 1:
        raise InvalidAlphaError(f"alpha must lie in (0, 1), got {alpha!r}")
    chain = [one, a]  # a_{n+1}, a_n, then descending
    for _ in range(n - 1):
        nxt, cur = chain[-2], chain[-1]
        den = 2 * nxt - cur
        if den <= 0:
            raise InvalidAlphaError(f"non-positive recursion denominator {den}")
        chain.append(cur * nxt / den)
    out = chain[1:][::-1]
    if not all(0 < v < 1 for v in out):
        raise InvalidAlphaError(f"exponent chain left (0, 1): {out}")
    return out


@dataclass(frozen=True)
class Polynomial:
    """Monic real polynomial, coefficients highest degree first."""

    coefficients: tuple[float, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.coefficients)
        if len(coeffs) < 2:
            raise DomainError("polynomial degree must be >= 1")
        if coeffs[0] != 1.0:
            raise DomainError(f"polynomial must be monic, leading coefficient {coeffs[0]}")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


def routh_first_column(coefficients: Sequence[float]) -> list[float]:
    """First column of the Routh array (stops early at a zero pivot)."""
    c = [float(v) for v in coefficients]
    n = len(c) - 1
    width = n // 2 + 1
    prev = c[0::2] + [0.0] * (width - len(c[0::2]))
    cur = c[1::2] + [0.0] * (width - len(c[1::2]))
    column = [prev[0], cur[0]]
    for _ in range(n - 1):
        if cur[0] == 0.0:
            break
        nxt = [
            (cur[0] * prev[j + 1] - prev[0] * cur[j + 1]) / cur[0] for j in range(width - 1)
        ] + [0.0]
        prev, cur = cur, nxt
        column.append(cur[0])
    return column[: n + 1]


def is_hurwitz(p: Polynomial | Sequence[float]) -> bool:
    """True iff every root of the monic polynomial has strictly negative real part.

    Uses the Routh-Hurwitz array; an exact zero pivot (marginal or degenerate
    case) is reported as not Hurwitz.
    """
    if not isinstance(p, Polynomial):
        p = Polynomial(tuple(p))
    column = routh_first_column(p.coefficients)
    if len(column) < p.degree + 1:
        return False
    return all(v > 0.0 for v in column)


@dataclass(frozen=True)
class IntegratorConfig:
    step_size: float = 0.001
    method: str = "rk4"

    def __post_init__(self) -> None:
        if not (self.step_size > 0.0 and math.isfinite(self.step_size)):
            raise DomainError(f"step size must be positive, got {self.step_size!r}")
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}; expected one of {METHODS}")


def integrate_step(f: VectorField, t: float, x, cfg: IntegratorConfig) -> np.ndarray:
    """Advance ``x`` by one fixed step of ``cfg.method``.

    ``f(t, x)`` is evaluated at the intermediate stage times and states, so any
    discontinuous term inside ``f`` is sampled per stage.
    """
    h = cfg.step_size
    x = np.asarray(x, dtype=float)
    if cfg.method == "euler":
        x_new = x + h * f(t, x)
    else:
        k1 = f(t, x)
        k2 = f(t + 0.5 * h, x + (0.5 * h) * k1)
        k3 = f(t + 0.5 * h, x + (0.5 * h) * k2)
        k4 = f(t + h, x + h * k3)
        x_new = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.isfinite(x_new).all():
        raise NumericBlowupError(t, "non-finite state or derivative")
    return x_new


def integrate(f: VectorField, x0, t_end: float, cfg: IntegratorConfig) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step trajectory on the uniform grid ``0, h, ..., floor(t_end/h) h``."""
    steps = int(math.floor(t_end / cfg.step_size + 1e-9))
    x = np.asarray(x0, dtype=float)
    out = np.empty((steps + 1, x.size))
    out[0] = x
    for k in range(steps):
        x = integrate_step(f, k * cfg.step_size, x, cfg)
        out[k + 1] = x
    return np.arange(steps + 1) * cfg.step_size, out
