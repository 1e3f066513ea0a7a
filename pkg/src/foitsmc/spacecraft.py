"""Rigid spacecraft attitude stabilization with the observer-based sliding controller.

Attitude is a unit quaternion ``(q0, qv)``; the body obeys
``J Omega' = -Omega^x J Omega + u + d``. The sliding vector is

    s = e - e0 + int sig(e)^(1/2),     e = Omega + kv qv,

and the disturbance observer / gain adaptation mirror the scalar ones with
matrix gains ``Lambda``, ``mu``, ``tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InvalidGainsError, InvalidSplitError
from .numerics import sig_pow_vec
from .observer import reaching_time_bound

REFERENCE_INERTIA = ((20.0, 0.0, 0.9), (0.0, 17.0, 0.0), (0.9, 0.0, 15.0))


def cross_mat(a: Sequence[float]) -> np.ndarray:
    a1, a2, a3 = (float(v) for v in a)
    return np.array([[0.0, -a3, a2], [a3, 0.0, -a1], [-a2, a1, 0.0]])


def _is_spd(M: np.ndarray) -> bool:
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-12):
        return False
    return all(np.linalg.det(M[:k, :k]) > 0.0 for k in range(1, M.shape[0] + 1))


@dataclass(frozen=True)
class Quaternion:
    q0: float
    qv: tuple[float, float, float]

    @classmethod
    def from_vector(cls, qv: Sequence[float]) -> "Quaternion":
        """Unit quaternion with the given vector part and non-negative scalar part."""
        qv = tuple(float(v) for v in qv)
        rest = 1.0 - sum(v * v for v in qv)
        if rest < 0.0:
            raise DomainError(f"vector part {qv} has norm > 1")
        return cls(math.sqrt(rest), qv)

    def as_array(self) -> np.ndarray:
        return np.array([self.q0, *self.qv])

    def norm_error(self) -> float:
        return abs(self.q0**2 + sum(v * v for v in self.qv) - 1.0)


def normalize_quaternion(q: np.ndarray) -> np.ndarray:
    return q / math.sqrt(float(q @ q))


@dataclass(frozen=True, eq=False)
class RigidBody:
    J: np.ndarray = field(default_factory=lambda: np.array(REFERENCE_INERTIA))

    def __post_init__(self) -> None:
        J = np.array(self.J, dtype=float)
        if J.shape != (3, 3) or not _is_spd(J):
            raise DomainError("inertia must be a symmetric positive-definite 3x3 matrix")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "J_inv", np.linalg.inv(J))


@dataclass(frozen=True, eq=False)
class ScGains:
    """Gains of the spacecraft controller, observer and adaptation law.

    ``e0`` is the initial value of ``e``; it is filled in by :func:`sc_init`.
    """

    kv: float = 1.0
    Theta: np.ndarray = field(default_factory=lambda: 2.0 * np.eye(3))
    Lambda: np.ndarray = field(default_factory=lambda: 50.0 * np.eye(3))
    mu: np.ndarray = field(default_factory=lambda: 2.0 * np.eye(3))
    tau: np.ndarray = field(default_factory=lambda: 5.0 * np.eye(3))
    e0: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        for name in ("Theta", "Lambda", "mu", "tau"):
            M = np.array(getattr(self, name), dtype=float)
            if M.ndim == 0:
                M = float(M) * np.eye(3)
            if M.shape != (3, 3) or not _is_spd(M):
                raise InvalidGainsError(f"{name} must be symmetric positive definite")
            object.__setattr__(self, name, M)
        if np.count_nonzero(self.tau - np.diag(np.diag(self.tau))):
            raise InvalidGainsError("tau must be diagonal")
        if not self.kv > 0.0:
            raise InvalidGainsError("kv must be positive")
        object.__setattr__(self, "e0", np.array(self.e0, dtype=float))
        object.__setattr__(self, "Lambda_inv", np.linalg.inv(self.Lambda))

    def with_e0(self, e0: Sequence[float]) -> "ScGains":
        return ScGains(self.kv, self.Theta, self.Lambda, self.mu, self.tau, np.array(e0, dtype=float))


def attitude_rhs(body: RigidBody, q: np.ndarray, Omega: np.ndarray, u: np.ndarray, d: np.ndarray):
    """Rates ``(q0', qv', Omega')`` of the quaternion kinematics and Euler equations."""
    q0, qv = q[0], q[1:]
    q0_dot = -0.5 * float(qv @ Omega)
    qv_dot = 0.5 * (q0 * Omega + np.cross(qv, Omega))
    JW = body.J @ Omega
    Omega_dot = body.J_inv @ (-np.cross(Omega, JW) + u + d)
    return q0_dot, qv_dot, Omega_dot


def sc_sliding(g: ScGains, q: np.ndarray, Omega: np.ndarray, integral_term: np.ndarray):
    """Sliding vector ``s`` and error ``e = Omega + kv qv``."""
    e = Omega + g.kv * q[1:]
    return e - g.e0 + integral_term, e


def sc_control(
    g: ScGains,
    body: RigidBody,
    q: np.ndarray,
    Omega: np.ndarray,
    s: np.ndarray,
    e: np.ndarray,
    d_hat: np.ndarray | None = None,
    exact_cancellation: bool = False,
) -> np.ndarray:
    """Control torque.

    The default is ``Omega^x J Omega - kv/2 J (q0 I - qv^x) Omega - J sig(e)^(1/2) - J Theta s``.
    With ``exact_cancellation`` the kinematic term uses ``(q0 I + qv^x)`` (the
    actual ``qv'`` map) so that ``s' = J^-1 (d - d_hat) - Theta s``; ``d_hat``,
    when given, is subtracted as feedforward.
    """
    J = body.J
    q0, qv = q[0], q[1:]
    kin = q0 * Omega + (np.cross(qv, Omega) if exact_cancellation else -np.cross(qv, Omega))
    u = np.cross(Omega, J @ Omega) - 0.5 * g.kv * (J @ kin) - J @ sig_pow_vec(e, 0.5) - J @ (g.Theta @ s)
    if d_hat is not None:
        u = u - d_hat
    return u


def sc_observer_rhs(g: ScGains, body: RigidBody, Omega, z, u, k_hat, sgn_dtilde, s):
    """Estimate ``d_hat = Lambda (Omega - z)`` and the observer rate ``z'``."""
    d_hat = g.Lambda @ (Omega - z)
    Ji = body.J_inv
    z_dot = (
        -Ji @ np.cross(Omega, body.J @ Omega)
        + Ji @ u
        + Ji @ d_hat
        - g.Lambda_inv @ (k_hat * sgn_dtilde)
        - g.Lambda_inv @ (Ji @ s)
    )
    return d_hat, z_dot


def sc_k_rate(g: ScGains, k_hat: np.ndarray, s: np.ndarray) -> np.ndarray:
    return -g.tau @ k_hat + g.mu @ np.abs(s)


@dataclass(frozen=True)
class ScBounds:
    Gamma: float
    Delta_bar: float
    R_sc: float
    radius: float
    varrho: float

    def reaching_time(self, V0: float) -> float:
        return reaching_time_bound(V0, self.Gamma, self.varrho, self.Delta_bar)


def sc_bounds(g: ScGains, body: RigidBody, k_true: Sequence[float], varrho: float | None = None) -> ScBounds:
    """Rate ``Gamma``, offset ``Delta_bar``, ball ``R_sc`` for ``V`` and radius for ``||s||``.

    ``varrho`` defaults to ``Gamma / 2``.
    """
    mu_max = float(np.linalg.eigvalsh(g.mu).max())
    Theta_bar = g.Theta - 0.5 * mu_max * np.eye(3)
    LJ = g.Lambda @ body.J_inv
    Lambda_bar = 0.5 * (LJ + LJ.T) - 0.5 * np.eye(3)
    tau0 = g.tau - (mu_max + 1.0) * np.eye(3)
    mins = (
        float(np.linalg.eigvalsh(Theta_bar).min()),
        float(np.linalg.eigvalsh(Lambda_bar).min()),
        float(np.diag(tau0).min()) / 2.0,
    )
    if min(mins) <= 0.0:
        raise InvalidGainsError(f"bound chain needs positive definite Theta_bar, Lambda_bar, tau0; got minima {mins}")
    Gamma = min(mins)
    if varrho is None:
        varrho = 0.5 * Gamma
    if not 0.0 < varrho < Gamma:
        raise InvalidSplitError(f"varrho={varrho} must lie in (0, Gamma={Gamma})")
    k = np.asarray(k_true, dtype=float)
    Delta_bar = float(np.diag(g.tau).max()) * float(k @ k)
    R_sc = Delta_bar / (Gamma - varrho)
    return ScBounds(Gamma, Delta_bar, R_sc, math.sqrt(2.0 * R_sc), varrho)


@dataclass(frozen=True)
class VectorSineDisturbance:
    """``d_i(t) = a_i sin(w_i t + phi_i)`` with ``|d_i'| <= a_i w_i``."""

    amplitude: tuple[float, float, float] = (0.1, 0.2, 0.1)
    omega: tuple[float, float, float] = (0.5, 0.3, 0.4)
    phase: tuple[float, float, float] = (0.0, 0.0, 0.5 * math.pi)

    def __call__(self, t: float) -> np.ndarray:
        return np.array([a * math.sin(w * t + p) for a, w, p in zip(self.amplitude, self.omega, self.phase)])

    def as_tuple(self, t: float) -> tuple[float, float, float]:
        return tuple(a * math.sin(w * t + p) for a, w, p in zip(self.amplitude, self.omega, self.phase))

    def rate_bound(self) -> np.ndarray:
        return np.array([abs(a * w) for a, w in zip(self.amplitude, self.omega)])


DEFAULT_QV0 = (0.3, -0.2, 0.3)
