"""Trajectory metrics: real-sliding detection, chattering, Lyapunov trace checks."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .observer import reaching_time_bound, theoretical_bounds
from .plants import DisturbanceSignal
from .scenario import Scenario
from .simulate import TrajectoryRecord, _atomic_write, k_true_of, run
from .spacecraft import RigidBody, sc_bounds

METRICS_SCHEMA = "foitsmc-metrics/1"
ADO_KINDS = ("foitsmc_ado", "foitsmc_fast_ado")


def detect_real_sliding(t, s, epsilon: float) -> Optional[float]:
    """Earliest ``t_r`` with ``|s| <= epsilon`` at every sample from ``t_r`` on."""
    if not epsilon > 0.0:
        raise ValueError("epsilon must be positive")
    t = np.asarray(t, dtype=float)
    outside = np.flatnonzero(np.abs(np.asarray(s, dtype=float)) > epsilon)
    if outside.size == 0:
        return float(t[0])
    last = outside[-1]
    return float(t[last + 1]) if last + 1 < t.size else None


def entry_time(t, values, radius: float) -> Optional[float]:
    """Earliest time after which ``values <= radius`` for the rest of the record."""
    t = np.asarray(t, dtype=float)
    outside = np.flatnonzero(np.asarray(values) > radius)
    if outside.size == 0:
        return float(t[0])
    last = outside[-1]
    return float(t[last + 1]) if last + 1 < t.size else None


def chattering_index(t, u) -> float:
    """Total variation of ``u`` per unit time (summed over columns for vector inputs)."""
    t = np.asarray(t, dtype=float)
    if t.size < 2:
        raise ValueError("need at least two samples")
    u = np.asarray(u, dtype=float)
    return float(np.abs(np.diff(u, axis=0)).sum() / (t[-1] - t[0]))


def lyapunov_check(t, V, gamma: float, delta_bar: float, radius: float, tol: float | None = None) -> float:
    """Fraction of samples outside ``V <= radius`` where the forward difference of
    ``V`` exceeds ``-gamma V + delta_bar + tol``; 0 when no sample lies outside.

    ``tol`` defaults to ``1e-3 * max(1, V(0))``.
    """
    t = np.asarray(t, dtype=float)
    V = np.asarray(V, dtype=float)
    if tol is None:
        tol = 1e-3 * max(1.0, float(V[0]))
    rate = np.diff(V) / np.diff(t)
    Vk = V[:-1]
    mask = Vk > radius
    if not mask.any():
        return 0.0
    bad = rate[mask] > -gamma * Vk[mask] + delta_bar + tol
    return float(bad.mean())


def sign_decrease_fraction(s, epsilon: float) -> tuple[float, int]:
    """Fraction of samples with ``|s| > epsilon`` where ``s * (s_next - s) <= 0``."""
    s = np.asarray(s, dtype=float)
    ds = np.diff(s)
    sk = s[:-1]
    mask = np.abs(sk) > epsilon
    count = int(mask.sum())
    if count == 0:
        return 1.0, 0
    return float((sk[mask] * ds[mask] <= 0.0).mean()), count


def local_max_decay(values, min_drop: float = 0.1) -> bool:
    """True if some strict local maximum is followed by a fall of ``min_drop`` of its value."""
    v = np.asarray(values, dtype=float)
    for i in range(1, v.size - 1):
        if v[i] > v[i - 1] and v[i] >= v[i + 1]:
            j = i + 1
            while j < v.size and v[j] == v[i]:
                j += 1
            if j < v.size and v[j] < v[i] and v[j:].min() <= v[i] * (1.0 - min_drop):
                return True
    return False


def sampling_floor(sc: Scenario) -> float:
    """One-step sampling resolution of the sliding loop.

    ``G h`` for the first-order switching law (``G`` its switching gain) and
    ``k h^2`` for laws whose discontinuity sits behind an integrator.
    """
    h = sc.step
    if sc.plant == "spacecraft":
        k = float(np.linalg.norm(sc.spacecraft.disturbance.rate_bound()))
        return max(k, 1.0) * h * h
    if sc.controller == "foitsmc_dis":
        return sc.dis.switching_gain * h
    return max(k_true_of(sc), 1.0) * h * h


def calibrate_epsilon(sc: Scenario) -> float:
    """Real-sliding band: 5x the larger of the zero-disturbance floor and the sampling floor."""
    if sc.plant == "spacecraft":
        sp = sc.spacecraft
        quiet = replace(sc, spacecraft=replace(sp, disturbance=replace(sp.disturbance, amplitude=(0.0, 0.0, 0.0))))
        floor = float(np.linalg.norm(run(quiet).group("s", 3), axis=1).max())
    else:
        quiet = replace(sc, disturbance=DisturbanceSignal("constant", value=0.0), chain=replace(sc.chain, d_max=None, s0=0.0))
        floor = float(np.abs(run(quiet)["s"]).max())
    return 5.0 * max(floor, sampling_floor(sc))


@dataclass
class MetricsReport:
    reaching_time_observed: Optional[float]
    reaching_time_bound: Optional[float]
    ultimate_bound_theoretical: Optional[float]
    ultimate_bound_observed: Optional[float]
    chattering_index: float
    lyapunov_violation_fraction: Optional[float]
    real_sliding_epsilon: float
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"schema_version": METRICS_SCHEMA}
        out.update(asdict(self))
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def write(self, path: str | Path) -> None:
        _atomic_write(Path(path), self.to_json())

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        d = {k: v for k, v in d.items() if k != "schema_version"}
        return cls(**d)


def _chain_order(tr: TrajectoryRecord) -> int:
    return sum(1 for c in tr.columns if c[0] == "x" and c[1:].isdigit())


def compute_metrics(sc: Scenario, tr: TrajectoryRecord) -> MetricsReport:
    eps = sc.sliding_epsilon if sc.sliding_epsilon is not None else calibrate_epsilon(sc)
    if sc.plant == "spacecraft":
        return _spacecraft_metrics(sc, tr, eps)
    t, s, V = tr.t, tr["s"], tr["V"]
    extras = {
        "max_abs_s": float(np.abs(s).max()),
        "final_state_norm": float(np.linalg.norm(tr.group("x", _chain_order(tr))[-1])),
        "gain_sup": float(tr["k_hat"].max()),
        "real_sliding_time": detect_real_sliding(t, s, eps),
    }
    chat = chattering_index(t, tr["u"])
    if sc.controller not in ADO_KINDS:
        t_r = extras["real_sliding_time"]
        ub = float(np.abs(s[t >= t_r]).max()) if t_r is not None else None
        return MetricsReport(t_r, None, None, ub, chat, None, eps, extras)
    k_true = k_true_of(sc)
    gamma, delta_bar, B = theoretical_bounds(sc.ado.params, sc.ado.gains, k_true, sc.theta)
    theta = sc.theta if sc.theta is not None else 0.5 * gamma
    radius = delta_bar / (gamma - theta)
    t_r = entry_time(t, V, radius)
    bound = reaching_time_bound(float(V[0]), gamma, theta, delta_bar)
    err = np.column_stack([s, tr["d_tilde"], k_true - tr["k_hat"]])
    after = t >= (t_r if t_r is not None else math.inf)
    ub = float(np.linalg.norm(err[after], axis=1).max()) if after.any() else None
    extras.update(
        gamma=gamma,
        delta_bar=delta_bar,
        theta=theta,
        V0=float(V[0]),
        V_ball=radius,
        sup_s_dtilde_after_reaching=float(np.linalg.norm(err[after, :2], axis=1).max()) if after.any() else None,
    )
    lyap = lyapunov_check(t, V, gamma, delta_bar, radius)
    return MetricsReport(t_r, bound, B, ub, chat, lyap, eps, extras)


def _spacecraft_metrics(sc: Scenario, tr: TrajectoryRecord, eps: float) -> MetricsReport:
    setup = sc.spacecraft
    body = RigidBody(setup.J)
    k_true = setup.disturbance.rate_bound()
    b = sc_bounds(setup.gains, body, k_true, sc.theta)
    t, V = tr.t, tr["V"]
    s = tr.group("s", 3)
    s_norm = np.linalg.norm(s, axis=1)
    t_r = entry_time(t, V, b.R_sc)
    after = t >= (t_r if t_r is not None else math.inf)
    q = tr.group("q", 3)
    qn = tr["q0"] ** 2 + (q**2).sum(axis=1)
    extras = {
        "Gamma": b.Gamma,
        "Delta_bar": b.Delta_bar,
        "varrho": b.varrho,
        "R_sc": b.R_sc,
        "V0": float(V[0]),
        "max_s_norm": float(s_norm.max()),
        "quaternion_norm_drift": float(np.abs(qn - 1.0).max()),
        "max_abs_omega": float(np.abs(tr.group("Omega", 3)).max()),
        "max_abs_u": float(np.abs(tr.group("u", 3)).max()),
        "max_abs_d_tilde": float(np.abs(tr.group("d_tilde", 3)).max()),
        "gain_sup": float(tr.group("k_hat", 3).max()),
        "real_sliding_time": detect_real_sliding(t, s_norm, eps),
    }
    return MetricsReport(
        reaching_time_observed=t_r,
        reaching_time_bound=b.reaching_time(float(V[0])),
        ultimate_bound_theoretical=b.radius,
        ultimate_bound_observed=float(s_norm[after].max()) if after.any() else None,
        chattering_index=chattering_index(t, tr.group("u", 3)),
        lyapunov_violation_fraction=lyapunov_check(t, V, b.Gamma, b.Delta_bar, b.R_sc),
        real_sliding_epsilon=eps,
        extras=extras,
    )


@dataclass
class Comparison:
    a: str
    b: str
    common_reaching_time: float
    gain_sup: tuple[float, float]
    s_sup_after_reaching: tuple[float, float]
    chattering: tuple[float, float]
    verdicts: dict

    def to_dict(self) -> dict:
        out = asdict(self)
        out["schema_version"] = "foitsmc-compare/1"
        out["deltas"] = {
            "gain_sup": self.gain_sup[0] - self.gain_sup[1],
            "s_sup_after_reaching": self.s_sup_after_reaching[0] - self.s_sup_after_reaching[1],
            "chattering": self.chattering[0] - self.chattering[1],
        }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def compare(sc_a: Scenario, sc_b: Scenario, tr_a=None, tr_b=None, m_a=None, m_b=None) -> Comparison:
    """Paired metrics of two controllers on the same chain plant and disturbance.

    The common reaching time is the later of the two observed reaching times
    (runs that never report one do not constrain it).
    """
    if sc_a.plant != "chain" or sc_b.plant != "chain":
        raise ValueError("comparison needs two chain-plant scenarios")
    same_plant = (
        sc_a.chain == sc_b.chain
        and sc_a.C == sc_b.C
        and sc_a.alpha == sc_b.alpha
        and sc_a.disturbance == sc_b.disturbance
        and sc_a.horizon == sc_b.horizon
        and sc_a.step == sc_b.step
    )
    if not same_plant:
        raise ValueError("scenarios differ in plant, manifold, disturbance or time grid")
    tr_a = tr_a if tr_a is not None else run(sc_a)
    tr_b = tr_b if tr_b is not None else run(sc_b)
    m_a = m_a if m_a is not None else compute_metrics(sc_a, tr_a)
    m_b = m_b if m_b is not None else compute_metrics(sc_b, tr_b)
    times = [m.reaching_time_observed for m in (m_a, m_b) if m.reaching_time_observed is not None]
    t_c = max(times) if times else 0.0
    after = tr_a.t >= t_c
    gain = (float(tr_a["k_hat"].max()), float(tr_b["k_hat"].max()))
    s_sup = (float(np.abs(tr_a["s"][after]).max()), float(np.abs(tr_b["s"][after]).max()))
    chat = (m_a.chattering_index, m_b.chattering_index)
    verdicts = {
        "a_smaller_gain": gain[0] < gain[1],
        "a_tighter_sliding": s_sup[0] < s_sup[1],
        "a_less_chattering": chat[0] < chat[1],
    }
    return Comparison(sc_a.name, sc_b.name, t_c, gain, s_sup, chat, verdicts)
