import json
import subprocess
import sys

import pytest

from foitsmc.cli import EXIT_BLOWUP, EXIT_INVALID, main
from foitsmc.scenario import builtin_scenario_dir


def test_run_writes_csv_and_metrics(tmp_path, capsys):
    assert main(["--seed", "11", "run", "--scenario", "example1", "--out", str(tmp_path)]) == 0
    d = json.loads((tmp_path / "example1.metrics.json").read_text())
    assert d["seed"] == 11
    assert d["schema_version"] == "foitsmc-metrics/1"
    header = (tmp_path / "example1.csv").read_text().splitlines()[0]
    assert header.startswith("t,x1,x2,x3,z,s,u")
    assert not list(tmp_path.glob("*.tmp"))


def test_run_accepts_path(tmp_path):
    path = builtin_scenario_dir() / "switching_law.ini"
    assert main(["run", "--scenario", str(path), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "switching_law.csv").exists()


def test_metrics_command(tmp_path, capsys):
    main(["run", "--scenario", "example1", "--out", str(tmp_path)])
    capsys.readouterr()
    out = tmp_path / "m.json"
    assert main(["metrics", "--trajectory", str(tmp_path / "example1.csv"), "--scenario", "example1",
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["reaching_time_observed"] == 0.0


def test_metrics_rejects_wrong_length(tmp_path):
    main(["run", "--scenario", "example1", "--out", str(tmp_path)])
    assert main(["metrics", "--trajectory", str(tmp_path / "example1.csv"), "--scenario", "example2"]) == EXIT_INVALID


def test_compare_command(tmp_path, capsys):
    assert main(["compare", "--a", "compare_sine_ado", "--b", "compare_sine_astw", "--out", str(tmp_path)]) == 0
    d = json.loads((tmp_path / "compare_sine_ado__vs__compare_sine_astw.json").read_text())
    assert d["verdicts"]["a_smaller_gain"]


def test_compare_mismatch_is_validation_error(tmp_path):
    assert main(["compare", "--a", "compare_sine_ado", "--b", "spacecraft", "--out", str(tmp_path)]) == EXIT_INVALID


def test_validate(capsys):
    assert main(["validate", "--scenario", "spacecraft"]) == 0
    assert "spacecraft: ok" in capsys.readouterr().out
    assert main(["validate", "--scenario", "no_such_thing"]) == EXIT_INVALID


def test_validate_bad_file(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[scenario]\nschema = foitsmc-scenario/1\nname = b\ncontroller = foitsmc_ado\n[ado]\nkappa = 0.1\n")
    assert main(["validate", "--scenario", str(bad)]) == EXIT_INVALID


def test_blowup_exit_code(tmp_path):
    bad = tmp_path / "boom.ini"
    bad.write_text(
        "[scenario]\nschema = foitsmc-scenario/1\nname = boom\ncontroller = foitsmc_stc\nhorizon = 1\n"
        "[chain]\nf_n = const:1e308\nf_delta = const:1e308\n"
    )
    with pytest.warns(RuntimeWarning):
        assert main(["run", "--scenario", str(bad), "--out", str(tmp_path)]) == EXIT_BLOWUP
    assert not (tmp_path / "boom.csv").exists()


def test_list(capsys):
    assert main(["list"]) == 0
    assert "example2" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "foitsmc.cli", "validate", "--scenario", "example1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
