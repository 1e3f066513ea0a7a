import math

import numpy as np
import pytest

from foitsmc.errors import DomainError, MissingBoundError, NumericBlowupError, ScenarioError
from foitsmc.plants import (
    ChainPlant,
    DisturbanceSignal,
    chain_rhs,
    disturbance_magnitude_bound,
    disturbance_rate_bound,
    disturbance_value,
    parse_handle,
    ramp,
    signal_handle,
)


def test_chain_rhs_examples():
    assert np.array_equal(chain_rhs(ChainPlant(3), [1, 2, 3], 0.0, 0.0), [2, 3, 0])
    p = ChainPlant(3, d0=lambda x, t: 0.5)
    assert np.array_equal(chain_rhs(p, [0, 0, 0], 0.0, 2.0), [0, 0, 2.5])
    p1 = ChainPlant(1, f_n=lambda x, t: -x[0])
    assert np.array_equal(chain_rhs(p1, [2.0], 0.0, 0.0), [-2.0])


def test_chain_rhs_errors():
    with pytest.raises(DomainError):
        chain_rhs(ChainPlant(3), [1, 2], 0.0, 0.0)
    with pytest.raises(NumericBlowupError):
        chain_rhs(ChainPlant(1), [0.0], 0.0, math.nan)
    with pytest.raises(DomainError):
        ChainPlant(0)


def test_chain_bound_checks():
    p = ChainPlant(1, f_delta=lambda x, t: 2.0, f_max=1.0, check_bounds=True)
    with pytest.raises(DomainError):
        chain_rhs(p, [0.0], 0.0, 0.0)
    p = ChainPlant(1, d0=lambda x, t: 2.0, d_max=1.0, check_bounds=True)
    with pytest.raises(DomainError):
        chain_rhs(p, [0.0], 0.0, 0.0)


def test_disturbance_values():
    sine = DisturbanceSignal("sine")
    assert disturbance_value(sine, 0.0) == 0.0
    assert disturbance_value(sine, 0.25) == pytest.approx(1.0)
    assert disturbance_value(DisturbanceSignal("sine_plus_ramp"), 2.0) == pytest.approx(2.0)
    assert DisturbanceSignal("constant", value=3.0)(7.0) == 3.0
    assert DisturbanceSignal("custom", fn=lambda t: t * t, k_bound=1.0)(3.0) == 9.0


def test_ramp():
    assert ramp(-1.0) == 0.0
    assert ramp(0.0) == 0.0
    assert ramp(2.0) == 2.0


def test_rate_bounds():
    assert disturbance_rate_bound(DisturbanceSignal("sine")) == pytest.approx(2 * math.pi)
    assert disturbance_rate_bound(DisturbanceSignal("constant", value=5.0)) == 0.0
    assert disturbance_rate_bound(DisturbanceSignal("sine_plus_ramp")) == pytest.approx(2 * math.pi + 1)
    with pytest.raises(MissingBoundError):
        disturbance_rate_bound(DisturbanceSignal("custom", fn=math.sin))
    assert disturbance_rate_bound(DisturbanceSignal("custom", fn=math.sin, k_bound=1.0)) == 1.0


def test_magnitude_bounds():
    assert disturbance_magnitude_bound(DisturbanceSignal("sine", amplitude=2.0)) == 2.0
    assert disturbance_magnitude_bound(DisturbanceSignal("sine_plus_ramp")) == math.inf


def test_unknown_kind():
    with pytest.raises(DomainError):
        DisturbanceSignal("noise")
    with pytest.raises(DomainError):
        DisturbanceSignal("custom")


@pytest.mark.parametrize(
    "sig",
    [
        DisturbanceSignal("sine"),
        DisturbanceSignal("sine", amplitude=0.3, frequency=2.5),
        DisturbanceSignal("sine_plus_ramp"),
        DisturbanceSignal("sine_plus_ramp", amplitude=0.5, slope=2.0),
        DisturbanceSignal("constant", value=-1.0),
    ],
)
def test_rate_bound_holds_on_dense_grid(sig):
    t = np.linspace(0.0, 5.0, 200_001)
    d = np.array([sig(v) for v in t])
    fd = np.abs(np.diff(d) / np.diff(t))
    assert fd.max() <= disturbance_rate_bound(sig) + 1e-6


def test_signal_handle_ignores_state():
    h = signal_handle(DisturbanceSignal("sine"))
    assert h([1, 2, 3], 0.25) == h([0, 0, 0], 0.25)


def test_parse_handle():
    fn, bound = parse_handle("zero")
    assert fn([1], 0) == 0.0 and bound == 0.0
    fn, bound = parse_handle("2.5")
    assert fn([1], 0) == 2.5 and bound == 2.5
    fn, bound = parse_handle("sin_x1:0.3")
    assert fn([math.pi / 2, 0], 0) == pytest.approx(0.3) and bound == 0.3
    fn, bound = parse_handle("damping:2")
    assert fn([0, 1.5], 0) == -3.0 and bound == math.inf
    with pytest.raises(ScenarioError):
        parse_handle("bogus")
