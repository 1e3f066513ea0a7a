"""Perturbed integrator chain and the matched-disturbance signal library."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .controllers import StateFn, unit_fn, zero_fn
from .errors import DomainError, MissingBoundError, NumericBlowupError, ScenarioError
from .numerics import sgn

SIGNAL_KINDS = ("sine", "sine_plus_ramp", "constant", "custom")


def ramp(t: float) -> float:
    return 0.5 * t * (sgn(t) + 1.0)


@dataclass(frozen=True)
class DisturbanceSignal:
    """Time-only matched disturbance.

    ``sine``: ``amplitude * sin(2 pi frequency t)``; ``sine_plus_ramp`` adds
    ``slope * ramp(t)``; ``constant`` is ``value``; ``custom`` wraps ``fn`` and
    needs an explicit ``k_bound``.
    """

    kind: str = "sine"
    amplitude: float = 1.0
    frequency: float = 1.0
    slope: float = 1.0
    value: float = 0.0
    fn: Optional[Callable[[float], float]] = field(default=None, compare=False)
    k_bound: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in SIGNAL_KINDS:
            raise DomainError(f"unknown disturbance kind {self.kind!r}")
        if self.kind == "custom" and self.fn is None:
            raise DomainError("custom disturbance needs a callable fn")

    def __call__(self, t: float) -> float:
        return disturbance_value(self, t)


def disturbance_value(sig: DisturbanceSignal, t: float) -> float:
    if sig.kind == "sine":
        return sig.amplitude * math.sin(2.0 * math.pi * sig.frequency * t)
    if sig.kind == "sine_plus_ramp":
        return sig.amplitude * math.sin(2.0 * math.pi * sig.frequency * t) + sig.slope * ramp(t)
    if sig.kind == "constant":
        return sig.value
    return float(sig.fn(t))


def disturbance_rate_bound(sig: DisturbanceSignal) -> float:
    """Declared bound ``k`` on ``|d'(t)|``."""
    if sig.k_bound is not None:
        return float(sig.k_bound)
    if sig.kind == "sine":
        return 2.0 * math.pi * abs(sig.frequency * sig.amplitude)
    if sig.kind == "sine_plus_ramp":
        return 2.0 * math.pi * abs(sig.frequency * sig.amplitude) + abs(sig.slope)
    if sig.kind == "constant":
        return 0.0
    raise MissingBoundError("custom disturbance signal has no declared k_bound")


def disturbance_magnitude_bound(sig: DisturbanceSignal) -> float:
    """Bound on ``|d(t)|``; infinite for signals containing a ramp."""
    if sig.kind == "sine":
        return abs(sig.amplitude)
    if sig.kind == "constant":
        return abs(sig.value)
    if sig.kind == "sine_plus_ramp" and sig.slope == 0.0:
        return abs(sig.amplitude)
    return math.inf


@dataclass(frozen=True)
class ChainPlant:
    """``x_i' = x_(i+1)``, ``x_n' = f_n + f_delta + b u + d0``.

    ``f_max`` and ``d_max`` are the declared bounds; when ``check_bounds`` is
    set, :func:`chain_rhs` raises if a trajectory violates them.
    """

    n: int = 3
    f_n: StateFn = zero_fn
    f_delta: StateFn = zero_fn
    b: StateFn = unit_fn
    d0: Callable[[Sequence[float], float], float] = zero_fn
    f_max: float = 0.0
    d_max: float = math.inf
    check_bounds: bool = False

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"chain order must be >= 1, got {self.n}")

    def disturbance(self, x, t) -> float:
        """Lumped matched disturbance ``d = d0 + f_delta`` (truth, simulator only)."""
        return self.d0(x, t) + self.f_delta(x, t)


def chain_rhs(p: ChainPlant, x: Sequence[float], t: float, u: float) -> np.ndarray:
    if len(x) != p.n:
        raise DomainError(f"state has {len(x)} components, plant order is {p.n}")
    fd = p.f_delta(x, t)
    d0 = p.d0(x, t)
    if p.check_bounds:
        if abs(fd) > p.f_max:
            raise DomainError(f"|f_delta|={abs(fd)} exceeds f_max={p.f_max} at t={t}")
        if abs(d0) > p.d_max:
            raise DomainError(f"|d0|={abs(d0)} exceeds d_max={p.d_max} at t={t}")
    out = np.empty(p.n)
    out[:-1] = np.asarray(x, dtype=float)[1:]
    out[-1] = p.f_n(x, t) + fd + p.b(x, t) * u + d0
    if not np.isfinite(out).all():
        raise NumericBlowupError(t, "non-finite plant derivative")
    return out


def signal_handle(sig: DisturbanceSignal) -> Callable[[Sequence[float], float], float]:
    """Adapt a time-only signal to the ``(x, t)`` handle signature."""

    def d0(x, t):
        return disturbance_value(sig, t)

    return d0


# Named state handles usable from scenario files: "name" or "name:param".

def _const(c: float) -> StateFn:
    def fn(x, t):
        return c

    return fn


def _damping(a: float) -> StateFn:
    def fn(x, t):
        return -a * x[-1]

    return fn


def _sin_x1(a: float) -> StateFn:
    def fn(x, t):
        return a * math.sin(x[0])

    return fn


HANDLES: dict[str, tuple[Callable[[float], StateFn], Callable[[float], float]]] = {
    # name: (factory, bound on |value| given the parameter)
    "zero": (lambda a: zero_fn, lambda a: 0.0),
    "const": (_const, abs),
    "damping": (_damping, lambda a: math.inf),
    "sin_x1": (_sin_x1, abs),
}


def parse_handle(text: str) -> tuple[StateFn, float]:
    """Resolve ``"name[:param]"`` (or a bare number, meaning ``const``) to a handle and its bound."""
    text = str(text).strip()
    try:
        value = float(text)
    except ValueError:
        pass
    else:
        return (unit_fn if value == 1.0 else _const(value)), abs(value)
    name, _, param = text.partition(":")
    if name not in HANDLES:
        raise ScenarioError(f"unknown handle {name!r}; known: {sorted(HANDLES)}")
    factory, bound = HANDLES[name]
    a = float(param) if param else 0.0
    return factory(a), bound(a)
