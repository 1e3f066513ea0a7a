import math

import pytest

from foitsmc.astw import AstwParams, AstwState, astw_output, astw_rates
from foitsmc.errors import InvalidGainsError


def test_output_examples():
    assert astw_output(AstwState(alpha=1.0), 0.0) == 0.0
    assert astw_output(AstwState(alpha=2.0), 1.0) == -2.0
    assert astw_output(AstwState(alpha=2.0, v=1.0), -4.0) == 5.0


def test_rates_examples():
    p = AstwParams()
    st = AstwState(alpha=2.0, params=p)
    a_dot, _ = astw_rates(st, p.mu_deadzone)
    assert a_dot == 0.0
    a_dot, _ = astw_rates(AstwState(alpha=p.alpha_m, params=p), 1.0)
    assert a_dot == p.eta
    _, v_dot = astw_rates(st, 0.5)
    assert v_dot == -2.0


def test_dead_zone_directions():
    p = AstwParams()
    st = AstwState(alpha=1.0, params=p)
    rate = p.omega1 * math.sqrt(p.gamma1 / 2)
    assert astw_rates(st, 0.01)[0] == -rate
    assert astw_rates(st, -0.01)[0] == -rate
    assert astw_rates(st, 0.2)[0] == rate


def test_beta():
    assert AstwState(alpha=3.0, params=AstwParams(epsilon=0.5)).beta == 3.0


def test_validation():
    with pytest.raises(InvalidGainsError):
        AstwParams(omega1=0.0)
    with pytest.raises(InvalidGainsError):
        AstwState(alpha=0.0)


def test_alpha_floor_in_closed_loop(runs):
    sc, tr, _ = runs("compare_sine_astw")
    h = sc.step
    assert tr["k_hat"].min() >= sc.astw.params.alpha_m - sc.astw.params.eta * h
