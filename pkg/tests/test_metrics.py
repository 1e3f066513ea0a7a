import json
import math
from dataclasses import replace

import numpy as np
import pytest

from foitsmc.metrics import (
    MetricsReport,
    calibrate_epsilon,
    chattering_index,
    compare,
    compute_metrics,
    detect_real_sliding,
    entry_time,
    local_max_decay,
    lyapunov_check,
    sampling_floor,
    sign_decrease_fraction,
)
from foitsmc.scenario import builtin_scenario


def test_detect_real_sliding_examples():
    t = np.arange(0, 5.0001, 0.001)
    assert detect_real_sliding(t, np.zeros_like(t), 0.1) == 0.0
    tr = detect_real_sliding(t, np.exp(-t), math.exp(-2))
    assert abs(tr - 2.0) <= 0.001 + 1e-12
    assert detect_real_sliding(t, np.ones_like(t), 0.5) is None
    with pytest.raises(ValueError):
        detect_real_sliding(t, t, 0.0)


def test_entry_time():
    t = np.array([0.0, 1.0, 2.0, 3.0])
    assert entry_time(t, [5, 1, 5, 1], 2.0) == 3.0
    assert entry_time(t, [5, 5, 5, 5], 2.0) is None


def test_chattering_examples():
    t = np.linspace(0, 1, 1000)
    assert chattering_index(t, np.full_like(t, 3.0)) == 0.0
    h = 0.001
    t = np.arange(1000) * h
    u = np.where(np.arange(1000) % 2 == 0, 1.0, -1.0)
    assert chattering_index(t, u) == pytest.approx(2 * 999 / t[-1])
    t = np.linspace(0, 2 * math.pi, 100_001)
    assert chattering_index(t, np.sin(t)) == pytest.approx(4 / (2 * math.pi), rel=1e-6)
    with pytest.raises(ValueError):
        chattering_index([0.0], [1.0])


def test_lyapunov_check_examples():
    t = np.arange(0, 10.0001, 0.001)
    gamma, db = 1.0, 2.0
    assert lyapunov_check(t, np.full_like(t, db / gamma), gamma, db, radius=0.5) == 0.0
    V = 50.0 * np.exp(-gamma * t) + db / gamma
    assert lyapunov_check(t, V, gamma, db, radius=0.5) == 0.0
    assert lyapunov_check(t, 10.0 + t, gamma, db, radius=1.0) == 1.0
    # nothing outside the ball
    assert lyapunov_check(t, np.full_like(t, 0.1), gamma, db, radius=1.0) == 0.0


def test_sign_decrease_fraction():
    s = np.array([1.0, 0.5, 0.2, 0.001, -0.001])
    assert sign_decrease_fraction(s, 0.01) == (1.0, 3)
    assert sign_decrease_fraction(np.array([1.0, 2.0, 3.0]), 0.5) == (0.0, 2)
    assert sign_decrease_fraction(np.zeros(4), 0.1) == (1.0, 0)


def test_local_max_decay():
    assert local_max_decay([0, 1, 2, 1.5, 1.0])
    assert not local_max_decay([0, 1, 2, 3])
    assert not local_max_decay([3, 2, 1])
    assert not local_max_decay([0, 1, 0.95, 0.95])


def test_sampling_floor():
    dis = builtin_scenario("switching_law")
    assert sampling_floor(dis) == pytest.approx(1.5 * dis.step)
    stc = builtin_scenario("example1")
    assert sampling_floor(stc) == pytest.approx(2 * math.pi * stc.step**2)


def test_frozen_epsilon_matches_calibration():
    for name in ("example1", "switching_law"):
        sc = builtin_scenario(name)
        assert calibrate_epsilon(sc) == pytest.approx(sc.sliding_epsilon, rel=1e-5)


def test_report_json_roundtrip(runs):
    sc, tr, _ = runs("example2")
    m = compute_metrics(sc, tr)
    d = json.loads(m.to_json())
    assert d["schema_version"] == "foitsmc-metrics/1"
    for key in ("reaching_time_observed", "reaching_time_bound", "ultimate_bound_theoretical",
                "ultimate_bound_observed", "chattering_index", "lyapunov_violation_fraction",
                "real_sliding_epsilon"):
        assert key in d
    assert MetricsReport.from_dict(d).to_json() == m.to_json()


def test_metrics_from_csv_close_to_memory(tmp_path, runs):
    from foitsmc.simulate import TrajectoryRecord

    sc, tr, _ = runs("example1")
    tr.write_csv(tmp_path / "e1.csv")
    back = TrajectoryRecord.read_csv(tmp_path / "e1.csv")
    a, b = compute_metrics(sc, tr), compute_metrics(sc, back)
    assert a.chattering_index == pytest.approx(b.chattering_index, rel=1e-6)
    assert a.reaching_time_observed == b.reaching_time_observed


def test_compare_identical_has_zero_deltas(runs):
    sc, tr, _ = runs("example2")
    d = compare(sc, sc, tr, tr).to_dict()
    assert all(v == 0.0 for v in d["deltas"].values())


def test_compare_rejects_mismatched_plants():
    a = builtin_scenario("compare_sine_ado")
    b = builtin_scenario("compare_ramp_astw")
    with pytest.raises(ValueError):
        compare(a, b)
    with pytest.raises(ValueError):
        compare(a, builtin_scenario("spacecraft"))


def test_compare_uses_later_reaching_time(runs):
    sc, tr, _ = runs("example2")
    other = replace(sc, name="shifted")
    c = compare(sc, other, tr, tr)
    assert c.common_reaching_time == 0.0


def test_chattering_ordering(runs):
    hold = compute_metrics(*runs("switching_law_hold")[:2]).chattering_index
    stc = compute_metrics(*runs("example1")[:2]).chattering_index
    ado = compute_metrics(*runs("example2")[:2]).chattering_index
    assert hold > 10 * stc > ado


def test_ado_metrics_fields(runs):
    sc, tr, _ = runs("example2")
    m = compute_metrics(sc, tr)
    assert m.extras["gamma"] == 1.0
    assert m.ultimate_bound_theoretical == pytest.approx(math.sqrt(2 * 0.5 * 5 * (2 * math.pi) ** 2 / 0.5))
    assert m.lyapunov_violation_fraction == 0.0
