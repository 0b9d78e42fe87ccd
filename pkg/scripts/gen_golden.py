#!/usr/bin/env python3
"""Regenerate the golden report files compared by tests/test_cli.py.

Run from the repository root:  PYTHONPATH=src python scripts/gen_golden.py
"""

import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from covsys.cli import main  # noqa: E402

FIXTURES = ROOT / "fixtures"
GOLDEN = FIXTURES / "golden"

CASES = {
    "gns_heisenberg3.json": ["gns", "--system", str(FIXTURES / "heisenberg3.json")],
    "gram_base.json": ["qst", "gram", "--config", str(FIXTURES / "qst_base.json"),
                       "--points", str(FIXTURES / "qst_points8.json")],
    "moments_base.csv": ["qst", "moments", "--config", str(FIXTURES / "qst_base.json"),
                         "--format", "csv"],
}


def run():
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in CASES.items():
        out = GOLDEN / name
        code = main([*argv, "--out", str(out)])
        print("wrote", out, "exit", code)


if __name__ == "__main__":
    run()
