"""Regenerate tests/golden/*.metrics.json from the built-in scenarios.

Run only after a deliberate change in numerics; the acceptance tests compare
fresh runs against these files.
"""

import json
import sys
from pathlib import Path

from foitsmc.metrics import compute_metrics
from foitsmc.scenario import builtin_names, builtin_scenario
from foitsmc.simulate import run

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def main() -> int:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name in builtin_names():
        sc = builtin_scenario(name)
        tr = run(sc)
        d = compute_metrics(sc, tr).to_dict()
        d["scenario"] = name
        d["samples"] = int(tr.data.shape[0])
        (GOLDEN / f"{name}.metrics.json").write_text(json.dumps(d, sort_keys=True, indent=2) + "\n")
        print(name, d["chattering_index"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
