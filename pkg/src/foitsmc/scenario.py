"""Scenario files: a versioned, flat INI schema.

Example::

    [scenario]
    schema = foitsmc-scenario/1
    name = example1
    plant = chain
    controller = foitsmc_stc
    horizon = 10
    step = 0.001

    [chain]
    x0 = 1, -1, 0.5

    [manifold]
    C = 80, 66, 15
    alpha = 0.7

    [disturbance]
    kind = sine

    [stc]
    k1 = 3.96
    k2 = 7.7

Every section other than ``[scenario]`` is optional and falls back to the
defaults below. Scalars given for matrix gains mean a multiple of the identity.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .astw import AstwParams
from .controllers import AdoGains, DisGains, StcGains, check_ado_gains
from .errors import FoitsmcError, ScenarioError
from .manifold import ManifoldSpec
from .numerics import IntegratorConfig
from .observer import AdoParams
from .plants import DisturbanceSignal, parse_handle
from .spacecraft import DEFAULT_QV0, REFERENCE_INERTIA, RigidBody, ScGains, VectorSineDisturbance

SCHEMA = "foitsmc-scenario/1"
CONTROLLERS = ("foitsmc_dis", "foitsmc_stc", "foitsmc_ado", "foitsmc_fast_ado", "astw")
PLANTS = ("chain", "spacecraft")


@dataclass(frozen=True)
class ChainSetup:
    x0: tuple[float, ...] = (1.0, -1.0, 0.5)
    f_n: str = "zero"
    f_delta: str = "zero"
    b: str = "1"
    f_max: Optional[float] = None
    d_max: Optional[float] = None
    # z(0) = x_n(0) - s0; 0 gives the no-reaching-phase start, nonzero values
    # exercise the reaching behaviour of the switching laws
    s0: float = 0.0


@dataclass(frozen=True)
class ObserverSetup:
    gains: AdoGains = field(default_factory=AdoGains)
    params: AdoParams = field(default_factory=AdoParams)
    k_hat0: float = 1.0
    # zeta(0) = x_n(0) - zeta0_offset, i.e. d_hat(0) = lam * zeta0_offset
    zeta0_offset: float = 0.0


@dataclass(frozen=True)
class AstwSetup:
    params: AstwParams = field(default_factory=AstwParams)
    alpha0: float = 1.0


@dataclass(frozen=True, eq=False)
class SpacecraftSetup:
    J: np.ndarray = field(default_factory=lambda: np.array(REFERENCE_INERTIA))
    gains: ScGains = field(default_factory=ScGains)
    qv0: tuple[float, float, float] = DEFAULT_QV0
    omega0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    k_hat0: tuple[float, float, float] = (1.0, 1.0, 1.0)
    disturbance: VectorSineDisturbance = field(default_factory=VectorSineDisturbance)
    renormalize: bool = True
    exact_cancellation: bool = False
    feedforward: bool = False


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    controller: str
    plant: str = "chain"
    horizon: float = 10.0
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    seed: int = 0
    chain: ChainSetup = field(default_factory=ChainSetup)
    C: tuple[float, ...] = (80.0, 66.0, 15.0)
    alpha: float = 0.7
    disturbance: DisturbanceSignal = field(default_factory=DisturbanceSignal)
    dis: DisGains = field(default_factory=lambda: DisGains(eta=0.5, d_max=1.0))
    dis_hold: bool = False
    stc: StcGains = field(default_factory=StcGains)
    ado: ObserverSetup = field(default_factory=ObserverSetup)
    astw: AstwSetup = field(default_factory=AstwSetup)
    spacecraft: SpacecraftSetup = field(default_factory=SpacecraftSetup)
    # metrics
    theta: Optional[float] = None
    k_true: Optional[float] = None
    sliding_epsilon: Optional[float] = None

    @property
    def step(self) -> float:
        return self.integrator.step_size

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.horizon / self.step + 1e-9))

    def manifold(self) -> ManifoldSpec:
        return ManifoldSpec.from_alpha(self.C, self.alpha)

    def validate(self) -> "Scenario":
        """Raise :class:`ScenarioError` unless the scenario can be run."""
        try:
            if self.plant not in PLANTS:
                raise ScenarioError(f"unknown plant {self.plant!r}")
            if self.controller not in CONTROLLERS:
                raise ScenarioError(f"unknown controller {self.controller!r}")
            if not (self.horizon > 0.0 and math.isfinite(self.horizon)):
                raise ScenarioError("horizon must be positive")
            if self.plant == "spacecraft":
                if self.controller != "foitsmc_ado":
                    raise ScenarioError("spacecraft plant supports controller = foitsmc_ado only")
                RigidBody(self.spacecraft.J)
                return self
            spec = self.manifold()
            if len(self.chain.x0) != spec.n:
                raise ScenarioError(f"x0 has {len(self.chain.x0)} entries, manifold order is {spec.n}")
            for h in (self.chain.f_n, self.chain.f_delta, self.chain.b):
                parse_handle(h)
            if self.controller in ("foitsmc_ado", "foitsmc_fast_ado"):
                check_ado_gains(self.ado.gains, self.ado.params.mu)
                if not self.ado.k_hat0 > 0.0:
                    raise ScenarioError("k_hat0 must be positive")
                if self.controller == "foitsmc_fast_ado" and not self.ado.gains.kappa2 > 0.0:
                    raise ScenarioError("foitsmc_fast_ado needs kappa2 > 0")
            if self.controller == "astw" and not self.astw.alpha0 > 0.0:
                raise ScenarioError("alpha0 must be positive")
        except ScenarioError:
            raise
        except FoitsmcError as exc:
            raise ScenarioError(str(exc)) from exc
        return self

    def with_disturbance(self, sig: DisturbanceSignal) -> "Scenario":
        return replace(self, disturbance=sig)

    def to_ini(self) -> str:
        return dump_scenario(self)


# ---------------------------------------------------------------- parsing


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _matrix(text: str) -> np.ndarray:
    rows = [r for r in text.split(";") if r.strip()]
    if len(rows) == 1:
        vals = _floats(rows[0])
        if len(vals) == 1:
            return vals[0] * np.eye(3)
        if len(vals) == 3:
            return np.diag(vals)
        if len(vals) == 9:
            return np.array(vals).reshape(3, 3)
        raise ScenarioError(f"cannot read 3x3 matrix from {text!r}")
    M = np.array([_floats(r) for r in rows])
    if M.shape != (3, 3):
        raise ScenarioError(f"cannot read 3x3 matrix from {text!r}")
    return M


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ScenarioError(f"not a boolean: {text!r}")


def _opt_float(sec, key):
    return float(sec[key]) if key in sec and sec[key].strip() not in ("", "none") else None


def parse_scenario(text: str) -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"malformed scenario file: {exc}") from exc
    if "scenario" not in cp:
        raise ScenarioError("missing [scenario] section")
    top = cp["scenario"]
    if top.get("schema", "").strip() != SCHEMA:
        raise ScenarioError(f"unsupported schema {top.get('schema')!r}; expected {SCHEMA!r}")
    get = lambda name: cp[name] if name in cp else {}  # noqa: E731
    try:
        sc = _build(top, get)
    except ScenarioError:
        raise
    except (FoitsmcError, ValueError, KeyError) as exc:
        raise ScenarioError(str(exc)) from exc
    return sc.validate()


def _build(top, get) -> Scenario:
    kw = dict(
        name=top["name"].strip(),
        controller=top["controller"].strip(),
        plant=top.get("plant", "chain").strip(),
        horizon=float(top.get("horizon", 10.0)),
        integrator=IntegratorConfig(float(top.get("step", 0.001)), top.get("method", "rk4").strip()),
        seed=int(top.get("seed", 0)),
    )
    ch = get("chain")
    chain = ChainSetup()
    if ch:
        chain = ChainSetup(
            x0=_floats(ch["x0"]) if "x0" in ch else chain.x0,
            f_n=ch.get("f_n", chain.f_n).strip(),
            f_delta=ch.get("f_delta", chain.f_delta).strip(),
            b=ch.get("b", chain.b).strip(),
            f_max=_opt_float(ch, "f_max"),
            d_max=_opt_float(ch, "d_max"),
            s0=float(ch.get("s0", 0.0)),
        )
    kw["chain"] = chain
    mf = get("manifold")
    if mf:
        kw["C"] = _floats(mf["C"]) if "C" in mf else Scenario.C
        kw["alpha"] = float(mf.get("alpha", 0.7))
    ds = get("disturbance")
    if ds:
        kw["disturbance"] = DisturbanceSignal(
            kind=ds.get("kind", "sine").strip(),
            amplitude=float(ds.get("amplitude", 1.0)),
            frequency=float(ds.get("frequency", 1.0)),
            slope=float(ds.get("slope", 1.0)),
            value=float(ds.get("value", 0.0)),
            k_bound=_opt_float(ds, "k_bound"),
        )
    dg = get("dis")
    if dg:
        kw["dis"] = DisGains(float(dg.get("eta", 0.5)), float(dg.get("d_max", 1.0)), float(dg.get("f_max", 0.0)))
        kw["dis_hold"] = _bool(dg.get("hold", "false"))
    st = get("stc")
    if st:
        kw["stc"] = StcGains.from_rho(float(st["rho"])) if "rho" in st else StcGains(
            float(st.get("k1", 3.96)), float(st.get("k2", 7.7))
        )
    ad = get("ado")
    if ad:
        kw["ado"] = ObserverSetup(
            gains=AdoGains(float(ad.get("kappa", 5.0)), float(ad.get("kappa2", 0.0))),
            params=AdoParams(
                lam=float(ad.get("lam", 5.0)),
                tau=float(ad.get("tau", 5.0)),
                mu=float(ad.get("mu", 2.0)),
                delay=float(ad.get("delay", kw["integrator"].step_size)),
            ),
            k_hat0=float(ad.get("k_hat0", 1.0)),
            zeta0_offset=float(ad.get("zeta0_offset", 0.0)),
        )
    aw = get("astw")
    if aw:
        d = AstwParams()
        kw["astw"] = AstwSetup(
            params=AstwParams(**{k: float(aw.get(k, getattr(d, k))) for k in d.__dataclass_fields__}),
            alpha0=float(aw.get("alpha0", 1.0)),
        )
    sp = get("spacecraft")
    if sp:
        dflt = SpacecraftSetup()
        g = ScGains(
            kv=float(sp.get("kv", 1.0)),
            Theta=_matrix(sp.get("Theta", "2")),
            Lambda=_matrix(sp.get("Lambda", "50")),
            mu=_matrix(sp.get("mu", "2")),
            tau=_matrix(sp.get("tau", "5")),
        )
        dist = VectorSineDisturbance(
            amplitude=_floats(sp["d_amplitude"]) if "d_amplitude" in sp else dflt.disturbance.amplitude,
            omega=_floats(sp["d_omega"]) if "d_omega" in sp else dflt.disturbance.omega,
            phase=_floats(sp["d_phase"]) if "d_phase" in sp else dflt.disturbance.phase,
        )
        kw["spacecraft"] = SpacecraftSetup(
            J=_matrix(sp["J"]) if "J" in sp else dflt.J,
            gains=g,
            qv0=_floats(sp["qv0"]) if "qv0" in sp else dflt.qv0,
            omega0=_floats(sp["omega0"]) if "omega0" in sp else dflt.omega0,
            k_hat0=_floats(sp["k_hat0"]) if "k_hat0" in sp else dflt.k_hat0,
            disturbance=dist,
            renormalize=_bool(sp.get("renormalize", "true")),
            exact_cancellation=_bool(sp.get("exact_cancellation", "false")),
            feedforward=_bool(sp.get("feedforward", "false")),
        )
    mt = get("metrics")
    if mt:
        kw["theta"] = _opt_float(mt, "theta")
        kw["k_true"] = _opt_float(mt, "k_true")
        kw["sliding_epsilon"] = _opt_float(mt, "sliding_epsilon")
    return Scenario(**kw)


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------- dumping


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (tuple, list, np.ndarray)) and np.ndim(v) == 1:
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, np.ndarray):
        return "; ".join(", ".join(repr(float(x)) for x in row) for row in v)
    return repr(float(v)) if isinstance(v, (int, float)) else str(v)


def dump_scenario(sc: Scenario) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp["scenario"] = {
        "schema": SCHEMA,
        "name": sc.name,
        "plant": sc.plant,
        "controller": sc.controller,
        "horizon": _fmt(sc.horizon),
        "step": _fmt(sc.step),
        "method": sc.integrator.method,
        "seed": str(sc.seed),
    }
    if sc.plant == "chain":
        ch = {"x0": _fmt(sc.chain.x0), "f_n": sc.chain.f_n, "f_delta": sc.chain.f_delta, "b": sc.chain.b,
              "s0": _fmt(sc.chain.s0)}
        for key in ("f_max", "d_max"):
            if getattr(sc.chain, key) is not None:
                ch[key] = _fmt(getattr(sc.chain, key))
        cp["chain"] = ch
        cp["manifold"] = {"C": _fmt(sc.C), "alpha": _fmt(sc.alpha)}
        d = sc.disturbance
        ds = {"kind": d.kind, "amplitude": _fmt(d.amplitude), "frequency": _fmt(d.frequency),
              "slope": _fmt(d.slope), "value": _fmt(d.value)}
        if d.k_bound is not None:
            ds["k_bound"] = _fmt(d.k_bound)
        cp["disturbance"] = ds
        if sc.controller == "foitsmc_dis":
            cp["dis"] = {"eta": _fmt(sc.dis.eta), "d_max": _fmt(sc.dis.d_max),
                         "f_max": _fmt(sc.dis.f_max), "hold": _fmt(sc.dis_hold)}
        elif sc.controller == "foitsmc_stc":
            cp["stc"] = {"k1": _fmt(sc.stc.k1), "k2": _fmt(sc.stc.k2)}
        elif sc.controller == "astw":
            p = sc.astw.params
            cp["astw"] = {k: _fmt(getattr(p, k)) for k in p.__dataclass_fields__}
            cp["astw"]["alpha0"] = _fmt(sc.astw.alpha0)
    if sc.controller in ("foitsmc_ado", "foitsmc_fast_ado") and sc.plant == "chain":
        a = sc.ado
        cp["ado"] = {"kappa": _fmt(a.gains.kappa), "kappa2": _fmt(a.gains.kappa2), "lam": _fmt(a.params.lam),
                     "tau": _fmt(a.params.tau), "mu": _fmt(a.params.mu), "delay": _fmt(a.params.delay),
                     "k_hat0": _fmt(a.k_hat0), "zeta0_offset": _fmt(a.zeta0_offset)}
    if sc.plant == "spacecraft":
        s = sc.spacecraft
        g = s.gains
        cp["spacecraft"] = {
            "J": _fmt(s.J), "kv": _fmt(g.kv), "Theta": _fmt(g.Theta), "Lambda": _fmt(g.Lambda),
            "mu": _fmt(g.mu), "tau": _fmt(g.tau), "qv0": _fmt(s.qv0), "omega0": _fmt(s.omega0),
            "k_hat0": _fmt(s.k_hat0), "d_amplitude": _fmt(s.disturbance.amplitude),
            "d_omega": _fmt(s.disturbance.omega), "d_phase": _fmt(s.disturbance.phase),
            "renormalize": _fmt(s.renormalize), "exact_cancellation": _fmt(s.exact_cancellation),
            "feedforward": _fmt(s.feedforward),
        }
    mt = {k: _fmt(getattr(sc, k)) for k in ("theta", "k_true", "sliding_epsilon") if getattr(sc, k) is not None}
    if mt:
        cp["metrics"] = mt
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def builtin_scenario_dir() -> Path:
    return Path(__file__).with_name("scenarios")


def builtin_scenario(name: str) -> Scenario:
    return load_scenario(builtin_scenario_dir() / f"{name}.ini")


def builtin_names() -> list[str]:
    return sorted(p.stem for p in builtin_scenario_dir().glob("*.ini"))
