"""Command line entry point: ``foitsmc run|metrics|compare|validate|list``.

Exit codes: 0 success, 2 validation failure, 3 numeric blowup.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .errors import FoitsmcError, NumericBlowupError, ScenarioError
from .metrics import compare, compute_metrics
from .scenario import builtin_names, builtin_scenario, builtin_scenario_dir, load_scenario
from .simulate import TrajectoryRecord, _atomic_write, run

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BLOWUP = 3

log = logging.getLogger("foitsmc")


def _load(ref: str, seed: int | None):
    """Scenario from a file path, or a built-in by name."""
    path = Path(ref)
    if path.exists():
        sc = load_scenario(path)
    elif ref in builtin_names():
        sc = builtin_scenario(ref)
    else:
        raise ScenarioError(f"no scenario file or built-in named {ref!r}")
    if seed is not None:
        sc = replace(sc, seed=seed)
    return sc


def _write_run(sc, out: Path) -> dict:
    tr = run(sc)
    report = compute_metrics(sc, tr)
    d = report.to_dict()
    d["scenario"] = sc.name
    d["seed"] = sc.seed
    tr.write_csv(out / f"{sc.name}.csv")
    _atomic_write(out / f"{sc.name}.metrics.json", json.dumps(d, sort_keys=True, indent=2) + "\n")
    log.info("wrote %s.csv and %s.metrics.json to %s", sc.name, sc.name, out)
    return d


def cmd_run(args) -> int:
    sc = _load(args.scenario, args.seed)
    d = _write_run(sc, Path(args.out))
    print(json.dumps({k: d[k] for k in ("reaching_time_observed", "ultimate_bound_observed", "chattering_index")}))
    return EXIT_OK


def cmd_metrics(args) -> int:
    sc = _load(args.scenario, args.seed)
    tr = TrajectoryRecord.read_csv(args.trajectory)
    expected = sc.n_steps + 1
    if tr.data.shape[0] != expected:
        raise ScenarioError(f"trajectory has {tr.data.shape[0]} samples, scenario implies {expected}")
    text = compute_metrics(sc, tr).to_json()
    if args.out:
        _atomic_write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_compare(args) -> int:
    a = _load(args.a, args.seed)
    b = _load(args.b, args.seed)
    try:
        result = compare(a, b)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    text = result.to_json()
    out = Path(args.out)
    _atomic_write(out / f"{a.name}__vs__{b.name}.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    sc = _load(args.scenario, args.seed)
    print(f"{sc.name}: ok ({sc.plant}, {sc.controller}, {sc.n_steps + 1} samples)")
    return EXIT_OK


def cmd_list(args) -> int:
    for name in builtin_names():
        print(f"{name}\t{builtin_scenario_dir() / (name + '.ini')}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="foitsmc", description="Integral-terminal sliding mode simulations.")
    ap.add_argument("--seed", type=int, default=None, help="recorded in outputs; built-ins are deterministic")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario, write CSV and metrics JSON")
    p.add_argument("--scenario", required=True, help="scenario file or built-in name")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("metrics", help="metrics of a stored trajectory")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", default=None, help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("compare", help="paired metrics of two scenarios")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="check a scenario without running it")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("list", help="list built-in scenarios")
    p.set_defaults(func=cmd_list)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except NumericBlowupError as exc:
        print(f"error: numeric blowup: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (FoitsmcError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
