#!/usr/bin/env python3
"""Regenerate the JSON fixtures under fixtures/.

Run from the repository root:  PYTHONPATH=src python scripts/gen_fixtures.py
The golden report files are produced separately by scripts/gen_golden.py.
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from covsys.multipliers import heisenberg_multiplier  # noqa: E402
from covsys.qst import QstParams, lorentz_boost, lorentz_rotation, random_weyl_points  # noqa: E402
from covsys.serialize import dumps_canonical, jsonable  # noqa: E402

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "fixtures"


def write(name, obj):
    path = FIXTURES / name
    path.write_text(dumps_canonical(jsonable(obj)))
    print("wrote", path)


def main():
    FIXTURES.mkdir(exist_ok=True)

    heis = {
        "algebra": {"kind": "function", "points": ["*"]},
        "group": {"product_cyclic": [3, 3]},
        "action": {"kind": "trivial"},
        "multiplier": {"kind": "heisenberg", "n": 3},
        "state": {"kind": "diagonal-delta"},
        "uv_pair": [3, 1],
    }
    write("heisenberg3.json", heis)

    _, xi = heisenberg_multiplier(3)
    good = xi.descriptor()
    good["kind"] = "table"
    write("heisenberg3_multiplier.json", good)

    bad = xi.descriptor()
    bad["kind"] = "table"
    bad.pop("phase_order")
    bad.pop("phase_index")
    bad["values"][4][7][0][0] = [-bad["values"][4][7][0][0][0],
                                 -bad["values"][4][7][0][0][1]]
    write("heisenberg3_corrupt.json", bad)

    zswap = {
        "algebra": {"kind": "function", "points": ["0", "1"]},
        "group": {"order": 2, "table": [[0, 1], [1, 0]]},
        "action": {"kind": "permutation", "perms": [[0, 1], [1, 0]]},
        "multiplier": {"kind": "trivial"},
        "state": {
            "kind": "tensor",
            # omega_{e,e} = evaluation at point 0, omega_{1,1} at point 1,
            # off-diagonal identically zero (the swap vector state)
            "data": [
                [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
                [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
            ],
        },
    }
    write("zswap.json", zswap)

    write("qst_base.json", QstParams().to_config())

    boosted = QstParams(atoms=[
        (np.eye(4), 0.5),
        (lorentz_boost(1, 0.5), 0.3),
        (lorentz_rotation(1, 0.7) @ lorentz_boost(3, -0.4), 0.2),
    ])
    write("qst_boosted3.json", boosted.to_config())

    violation = QstParams(c_seed=0.01 * np.eye(4))
    write("qst_violation.json", violation.to_config())

    pts = random_weyl_points(np.random.default_rng(0), 8, 1.0)
    write("qst_points8.json", {"points": pts.tolist()})


if __name__ == "__main__":
    main()
