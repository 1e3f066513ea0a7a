from dataclasses import replace

import numpy as np
import pytest

from foitsmc.errors import DomainError, NumericBlowupError, ScenarioError
from foitsmc.manifold import reduced_dynamics
from foitsmc.numerics import integrate
from foitsmc.plants import DisturbanceSignal
from foitsmc.scenario import ChainSetup, Scenario, builtin_scenario
from foitsmc.simulate import TrajectoryRecord, run

ZERO = DisturbanceSignal("constant", value=0.0)


@pytest.mark.parametrize("controller", ["foitsmc_dis", "foitsmc_stc", "foitsmc_ado", "astw"])
def test_zero_trajectory_at_origin(controller):
    sc = Scenario("zero", controller, horizon=0.5, chain=ChainSetup(x0=(0.0, 0.0, 0.0)), disturbance=ZERO)
    tr = run(sc)
    for col in ("x1", "x2", "x3", "s", "u", "d"):
        assert not tr[col].any(), col


@pytest.mark.parametrize("controller", ["foitsmc_stc", "foitsmc_dis", "foitsmc_ado"])
def test_closed_loop_matches_reduced_dynamics(controller):
    sc = Scenario("eq", controller, horizon=5.0, disturbance=ZERO)
    tr = run(sc)
    spec = sc.manifold()
    _, xs = integrate(lambda t, x: reduced_dynamics(spec, x), sc.chain.x0, 5.0, sc.integrator)
    assert np.abs(tr.group("x", 3) - xs).max() <= 1e-6


def test_sample_count_and_columns():
    sc = Scenario("c", "foitsmc_stc", horizon=0.0105)
    tr = run(sc)
    assert tr.data.shape[0] == 11
    assert tr.columns == ["t", "x1", "x2", "x3", "z", "s", "u", "d", "d_hat", "d_tilde", "k_hat", "V"]
    assert tr["s"][0] == 0.0


def test_spacecraft_columns(runs):
    _, tr, _ = runs("spacecraft")
    for c in ("q0", "q1", "q2", "q3", "Omega1", "s3", "u1", "d_tilde2", "k_hat3", "V"):
        assert tr.has(c)
    assert np.array_equal(tr.group("s", 3)[0], np.zeros(3))


def test_csv_roundtrip(tmp_path):
    tr = run(Scenario("c", "foitsmc_ado", horizon=0.05))
    path = tmp_path / "t.csv"
    tr.write_csv(path)
    back = TrajectoryRecord.read_csv(path)
    assert back.columns == tr.columns
    assert np.allclose(back.data, tr.data, rtol=1e-11, atol=1e-300)
    assert "-0," not in path.read_text()


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_blowup_reported_with_time():
    # drift terms that overflow once added
    sc = Scenario("b", "foitsmc_stc", horizon=5.0, chain=ChainSetup(f_n="const:1e308", f_delta="const:1e308"))
    with pytest.raises(NumericBlowupError) as info:
        run(sc)
    assert 0.0 <= info.value.t <= 5.0


def test_declared_disturbance_bound_is_enforced():
    sc = builtin_scenario("switching_law")
    sc = replace(sc, chain=replace(sc.chain, d_max=0.5), horizon=1.0)
    with pytest.raises(DomainError):
        run(sc)


def test_adaptive_gain_positive(runs):
    _, tr, _ = runs("example2")
    assert tr["k_hat"].min() > 0.0


def test_observer_continuity(runs):
    sc, tr, _ = runs("example2")
    dh = tr["d_hat"]
    # increments stay O(h): the discontinuity only enters the rate of zeta
    assert np.abs(np.diff(dh)).max() <= 50.0 * sc.step


def test_d_hat_settles_without_disturbance():
    sc = replace(builtin_scenario("example2"), disturbance=ZERO, horizon=10.0)
    tr = run(sc)
    assert abs(tr["d_hat"][-1]) <= 1e-3


def test_invalid_scenario_rejected():
    with pytest.raises(ScenarioError):
        run(Scenario("x", "nope"))
