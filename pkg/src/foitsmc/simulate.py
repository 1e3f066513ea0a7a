"""Augmented-state simulation loop.

Everything a run integrates -- plant, manifold integrator ``z``, controller
and observer internals, and the running integral behind ``omega`` -- lives in
one state vector so all components share the Runge-Kutta stages. Quantities
that are sampled rather than continuous (the delayed sign of ``d_tilde``, the
held switching sign in sample-and-hold mode) are fixed at the start of each
step and held across its stages.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .astw import AstwState, astw_output, astw_rates
from .controllers import EqvGains, StcState, stc_output, stc_v_rate, total_control, u_ado, u_dis
from .errors import DomainError, NumericBlowupError
from .manifold import z_rate
from .numerics import integrate_step, sgn
from .observer import AdoState, d_hat as observer_d_hat, k_hat_rate, sign_d_tilde, zeta_rate
from .plants import ChainPlant, disturbance_rate_bound, parse_handle, signal_handle
from .scenario import Scenario
from .spacecraft import (
    RigidBody,
    attitude_rhs,
    normalize_quaternion,
    sc_control,
    sc_k_rate,
    sc_observer_rhs,
    sc_sliding,
)

CSV_FORMAT = "%.12g"


@dataclass
class TrajectoryRecord:
    """Uniformly sampled trajectory; ``columns`` keeps the CSV column order."""

    columns: list[str]
    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def has(self, name: str) -> bool:
        return name in self.columns

    def group(self, prefix: str, count: int) -> np.ndarray:
        return np.column_stack([self[f"{prefix}{i}"] for i in range(1, count + 1)])

    @property
    def t(self) -> np.ndarray:
        return self["t"]

    @property
    def step(self) -> float:
        return float(self.meta.get("step", self.t[1] - self.t[0]))

    def to_csv_text(self) -> str:
        lines = [",".join(self.columns)]
        fmt = ",".join([CSV_FORMAT] * len(self.columns))
        # adding 0.0 turns -0.0 into 0.0 so signed zeros do not show up in the text
        lines.extend(fmt % tuple(row) for row in (self.data + 0.0).tolist())
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | Path) -> None:
        _atomic_write(Path(path), self.to_csv_text())

    @classmethod
    def read_csv(cls, path: str | Path) -> "TrajectoryRecord":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(header, data, {"step": float(data[1, 0] - data[0, 0]) if len(data) > 1 else 0.0})


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)


def build_chain(sc: Scenario) -> tuple[ChainPlant, EqvGains]:
    spec = sc.manifold()
    f_n, _ = parse_handle(sc.chain.f_n)
    f_delta, f_bound = parse_handle(sc.chain.f_delta)
    b, _ = parse_handle(sc.chain.b)
    plant = ChainPlant(
        n=spec.n,
        f_n=f_n,
        f_delta=f_delta,
        b=b,
        d0=signal_handle(sc.disturbance),
        f_max=sc.chain.f_max if sc.chain.f_max is not None else f_bound,
        d_max=sc.chain.d_max if sc.chain.d_max is not None else math.inf,
        check_bounds=sc.chain.d_max is not None or sc.chain.f_max is not None,
    )
    return plant, EqvGains(spec, f_n, b)


def k_true_of(sc: Scenario) -> float:
    return sc.k_true if sc.k_true is not None else disturbance_rate_bound(sc.disturbance)


def run(sc: Scenario) -> TrajectoryRecord:
    """Simulate ``sc`` over ``[0, horizon]`` on the grid ``k * step``."""
    sc.validate()
    if sc.plant == "spacecraft":
        return _run_spacecraft(sc)
    return _run_chain(sc)


def _run_chain(sc: Scenario) -> TrajectoryRecord:
    plant, eqv = build_chain(sc)
    spec = eqv.spec
    n = spec.n
    kind = sc.controller
    h = sc.step
    ado_kind = kind in ("foitsmc_ado", "foitsmc_fast_ado")
    x0 = np.asarray(sc.chain.x0, dtype=float)

    # augmented layout: x (n) | z | controller internals
    y = [*x0, x0[-1] - sc.chain.s0]
    if kind == "foitsmc_stc":
        stc = StcState(sc.stc)
        y += [0.0]
    elif ado_kind:
        ap, ag = sc.ado.params, sc.ado.gains
        obs = AdoState(zeta=x0[-1] - sc.ado.zeta0_offset, k_hat=sc.ado.k_hat0)
        # zeta, k_hat, integral of (f_n + b u + d_hat)
        y += [obs.zeta, obs.k_hat, 0.0]
        delay_steps = max(1, int(round(ap.delay / h)))
        omega_hist: deque = deque(maxlen=delay_steps + 1)
        k_true = k_true_of(sc)
    elif kind == "astw":
        aw = AstwState(alpha=sc.astw.alpha0, params=sc.astw.params)
        y += [aw.alpha, 0.0]
    y = np.array(y, dtype=float)

    held = {"s": 0.0, "sgn_dt": 0}

    def inner_and_rates(t, yy, x, s):
        """Inner control term and the controller/observer rates at one stage."""
        if kind == "foitsmc_dis":
            return u_dis(sc.dis, held["s"] if sc.dis_hold else s), ()
        if kind == "foitsmc_stc":
            stc.v = yy[n + 1]
            return stc_output(stc, s), (stc_v_rate(stc, s),)
        if kind == "astw":
            aw.alpha, aw.v = yy[n + 1], yy[n + 2]
            a_dot, v_dot = astw_rates(aw, s)
            return astw_output(aw, s), (a_dot, v_dot)
        obs.zeta, obs.k_hat = yy[n + 1], yy[n + 2]
        dh = observer_d_hat(ap, x[-1], obs)
        return u_ado(ag, s, dh), dh

    def rhs(t, yy):
        x = yy[:n].tolist()
        s = x[-1] - yy[n]
        inner, extra = inner_and_rates(t, yy, x, s)
        u = total_control(eqv, inner, x, t)
        out = np.empty_like(yy)
        out[: n - 1] = yy[1:n]
        out[n - 1] = plant.f_n(x, t) + plant.f_delta(x, t) + plant.b(x, t) * u + plant.d0(x, t)
        out[n] = z_rate(spec, x)
        if ado_kind:
            dh = extra
            sg = held["sgn_dt"]
            out[n + 1] = zeta_rate(ap, eqv, x, t, u, obs, sg, s)
            out[n + 2] = k_hat_rate(ap, obs.k_hat, s)
            out[n + 3] = eqv.f_n(x, t) + eqv.b(x, t) * u + dh
        else:
            out[n + 1 :] = extra
        return out

    steps = sc.n_steps
    cols = ["t", *[f"x{i}" for i in range(1, n + 1)], "z", "s", "u", "d", "d_hat", "d_tilde", "k_hat", "V"]
    data = np.empty((steps + 1, len(cols)))
    for k in range(steps + 1):
        t = k * h
        x = y[:n].tolist()
        s = x[-1] - y[n]
        if ado_kind:
            omega_hist.append(x[-1] - y[n + 3])
            obs.omega = omega_hist[-1]
            obs.omega_prev = omega_hist[0] if len(omega_hist) == omega_hist.maxlen else None
            held["sgn_dt"] = sign_d_tilde(obs)
        held["s"] = s
        if plant.check_bounds:
            plant_check(plant, x, t)
        # sample row (controller evaluated exactly as in the first stage)
        inner, extra = inner_and_rates(t, y, x, s)
        u = total_control(eqv, inner, x, t)
        d = plant.disturbance(x, t)
        if ado_kind:
            dh, gain = extra, obs.k_hat
            k_tilde = k_true - gain
            V = 0.5 * (s * s + (d - dh) ** 2 + k_tilde * k_tilde)
        else:
            if kind == "foitsmc_dis":
                dh, gain = 0.0, sc.dis.switching_gain
            elif kind == "foitsmc_stc":
                dh, gain = -stc.v, sc.stc.k1
            else:
                dh, gain = -aw.v, aw.alpha
            V = 0.5 * s * s
        data[k] = (t, *x, y[n], s, u, d, dh, d - dh, gain, V)
        if k == steps:
            break
        y = integrate_step(rhs, t, y, sc.integrator)
        if kind == "astw" and y[n + 1] < aw.params.alpha_m:
            y[n + 1] = aw.params.alpha_m
        if ado_kind and not y[n + 2] > 0.0:
            raise NumericBlowupError((k + 1) * h, f"adaptive gain lost positivity ({y[n + 2]!r})")
    if not np.isfinite(data).all():
        raise NumericBlowupError(float(data[~np.isfinite(data).all(axis=1)][0, 0]))
    meta = {"scenario": sc.name, "controller": kind, "plant": "chain", "step": h, "n": n}
    if ado_kind:
        meta["k_true"] = k_true
    return TrajectoryRecord(cols, data, meta)


def plant_check(plant: ChainPlant, x, t) -> None:
    fd = plant.f_delta(x, t)
    d0 = plant.d0(x, t)
    if abs(fd) > plant.f_max:
        raise DomainError(f"|f_delta|={abs(fd)} exceeds declared f_max={plant.f_max} at t={t}")
    if abs(d0) > plant.d_max:
        raise DomainError(f"|d0|={abs(d0)} exceeds declared d_max={plant.d_max} at t={t}")


def _mat(M) -> tuple:
    return tuple(tuple(float(v) for v in row) for row in np.asarray(M))


def _mv(M, a, b, c):
    r0, r1, r2 = M
    return (
        r0[0] * a + r0[1] * b + r0[2] * c,
        r1[0] * a + r1[1] * b + r1[2] * c,
        r2[0] * a + r2[1] * b + r2[2] * c,
    )


def _sqsgn(v: float) -> float:
    if v > 0.0:
        return math.sqrt(v)
    if v < 0.0:
        return -math.sqrt(-v)
    return 0.0


def spacecraft_rhs_factory(g, body: RigidBody, dist, held, exact_cancellation=False, feedforward=False):
    """Scalar-float right-hand side of the 19-dimensional spacecraft state.

    Layout: ``q (4) | Omega (3) | int sig(e)^(1/2) (3) | z (3) | k_hat (3) | int rate of omega (3)``.
    Equivalent to composing :func:`attitude_rhs`, :func:`sc_sliding`,
    :func:`sc_control`, :func:`sc_observer_rhs` and :func:`sc_k_rate`.
    """
    J, Ji = _mat(body.J), _mat(body.J_inv)
    Th, La, Li = _mat(g.Theta), _mat(g.Lambda), _mat(g.Lambda_inv)
    Mu, Ta = _mat(g.mu), _mat(g.tau)
    kv = float(g.kv)
    e01, e02, e03 = (float(v) for v in g.e0)
    ksign = 1.0 if exact_cancellation else -1.0

    def control(yy):
        q0, q1, q2, q3, w1, w2, w3, i1, i2, i3, z1, z2, z3 = yy[:13]
        e1, e2, e3 = w1 + kv * q1, w2 + kv * q2, w3 + kv * q3
        s1, s2, s3 = e1 - e01 + i1, e2 - e02 + i2, e3 - e03 + i3
        h1, h2, h3 = _mv(J, w1, w2, w3)
        g1, g2, g3 = w2 * h3 - w3 * h2, w3 * h1 - w1 * h3, w1 * h2 - w2 * h1  # Omega x J Omega
        c1, c2, c3 = q2 * w3 - q3 * w2, q3 * w1 - q1 * w3, q1 * w2 - q2 * w1  # qv x Omega
        k1, k2, k3 = _mv(J, q0 * w1 + ksign * c1, q0 * w2 + ksign * c2, q0 * w3 + ksign * c3)
        p1, p2, p3 = _mv(Th, s1, s2, s3)
        r1, r2, r3 = _mv(J, _sqsgn(e1) + p1, _sqsgn(e2) + p2, _sqsgn(e3) + p3)
        u1 = g1 - 0.5 * kv * k1 - r1
        u2 = g2 - 0.5 * kv * k2 - r2
        u3 = g3 - 0.5 * kv * k3 - r3
        dh1, dh2, dh3 = _mv(La, w1 - z1, w2 - z2, w3 - z3)
        if feedforward:
            u1, u2, u3 = u1 - dh1, u2 - dh2, u3 - dh3
        return (s1, s2, s3), (e1, e2, e3), (u1, u2, u3), (g1, g2, g3), (dh1, dh2, dh3)

    def rhs(t, yy):
        vals = yy.tolist()
        q0, q1, q2, q3, w1, w2, w3 = vals[:7]
        kh1, kh2, kh3 = vals[13:16]
        (s1, s2, s3), (e1, e2, e3), (u1, u2, u3), (g1, g2, g3), (dh1, dh2, dh3) = control(vals)
        d1, d2, d3 = dist(t)
        c1, c2, c3 = q2 * w3 - q3 * w2, q3 * w1 - q1 * w3, q1 * w2 - q2 * w1
        a1, a2, a3 = _mv(Ji, -g1 + u1 + d1, -g2 + u2 + d2, -g3 + u3 + d3)
        b1, b2, b3 = _mv(Ji, -g1 + u1 + dh1, -g2 + u2 + dh2, -g3 + u3 + dh3)
        sg1, sg2, sg3 = held["sgn"]
        l1, l2, l3 = _mv(Li, kh1 * sg1, kh2 * sg2, kh3 * sg3)
        m1, m2, m3 = _mv(Li, *_mv(Ji, s1, s2, s3))
        t1, t2, t3 = _mv(Ta, kh1, kh2, kh3)
        n1, n2, n3 = _mv(Mu, abs(s1), abs(s2), abs(s3))
        return np.array((
            -0.5 * (q1 * w1 + q2 * w2 + q3 * w3),
            0.5 * (q0 * w1 + c1), 0.5 * (q0 * w2 + c2), 0.5 * (q0 * w3 + c3),
            a1, a2, a3,
            _sqsgn(e1), _sqsgn(e2), _sqsgn(e3),
            b1 - l1 - m1, b2 - l2 - m2, b3 - l3 - m3,
            n1 - t1, n2 - t2, n3 - t3,
            b1, b2, b3,
        ))

    return rhs, control


def _run_spacecraft(sc: Scenario) -> TrajectoryRecord:
    setup = sc.spacecraft
    body = RigidBody(setup.J)
    h = sc.step
    q = np.array([0.0, *setup.qv0])
    q[0] = math.sqrt(max(0.0, 1.0 - float(q[1:] @ q[1:])))
    q = normalize_quaternion(q)
    Omega0 = np.asarray(setup.omega0, dtype=float)
    g = setup.gains.with_e0(Omega0 + setup.gains.kv * q[1:])
    dist = setup.disturbance
    k_true = dist.rate_bound()
    dist_t = dist.as_tuple

    y = np.concatenate([q, Omega0, np.zeros(3), Omega0, np.asarray(setup.k_hat0, float), np.zeros(3)])
    omega_hist: deque = deque(maxlen=2)
    held = {"sgn": (0.0, 0.0, 0.0)}
    rhs, control = spacecraft_rhs_factory(g, body, dist_t, held, setup.exact_cancellation, setup.feedforward)

    steps = sc.n_steps
    cols = (
        ["t", "q0", "q1", "q2", "q3", "Omega1", "Omega2", "Omega3"]
        + [f"{p}{i}" for p in ("s", "u", "d", "d_hat", "d_tilde", "k_hat") for i in (1, 2, 3)]
        + ["V"]
    )
    data = np.empty((steps + 1, len(cols)))
    for k in range(steps + 1):
        t = k * h
        omega_hist.append(y[4:7] - y[16:19])
        if len(omega_hist) == omega_hist.maxlen:
            held["sgn"] = tuple(np.sign(omega_hist[-1] - omega_hist[0]).tolist())
        vals = y.tolist()
        s, _, u, _, d_hat = control(vals)
        d = dist_t(t)
        d_tilde = [a - b for a, b in zip(d, d_hat)]
        k_tilde = [a - b for a, b in zip(k_true.tolist(), vals[13:16])]
        V = 0.5 * sum(v * v for v in (*s, *d_tilde, *k_tilde))
        data[k] = (t, *vals[:7], *s, *u, *d, *d_hat, *d_tilde, *vals[13:16], V)
        if k == steps:
            break
        y = integrate_step(rhs, t, y, sc.integrator)
        if setup.renormalize:
            y[0:4] = normalize_quaternion(y[0:4])
        if not (y[13:16] > 0.0).all():
            raise NumericBlowupError((k + 1) * h, "adaptive gain lost positivity")
    meta = {"scenario": sc.name, "controller": sc.controller, "plant": "spacecraft", "step": h,
            "k_true": k_true.tolist()}
    return TrajectoryRecord(cols, data, meta)
