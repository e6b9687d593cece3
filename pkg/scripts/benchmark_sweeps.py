#!/usr/bin/env python3
"""Regenerate the benchmark sweep data behind the complete/star trend plots.

For each graph family this sweeps the line weight, inertia, damping and
network size around the single-source benchmark point and records the
source-node frequency variance and the two interesting line variances,
one CSV per sweep, comparing the closed-form and numeric routes.

Usage:
    python3 scripts/benchmark_sweeps.py --out-dir sweep_output
"""

import argparse
import pathlib

from gridfluct.netfile import sweep_from_dict
from gridfluct.pipeline import run_sweep, write_sweep

AXES = {
    "damping": [0.1, 0.2, 0.3, 0.5, 0.8, 1.2, 1.7, 2.5],
    "eta": [0.05, 0.1, 0.2, 0.35, 0.5, 0.8, 1.2, 2.0],
    "gamma": [1.0, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0],
    "n": [4, 6, 8, 12, 16, 20, 30, 40],
}

BASES = {
    "complete": {"kind": "complete", "n": 20, "gamma": 10.0, "eta": 0.5,
                 "damping": 0.3, "noise": {"2": 0.04}},
    "star": {"kind": "star", "n": 20, "gamma": 10.0, "eta": 0.5,
             "damping": 0.2, "noise": {"2": 0.5}},
}

QUANTITIES = [
    {"block": "omega", "i": 2, "j": 2},   # frequency variance at the source
    {"block": "delta", "i": 1, "j": 1},   # line touching the source
    {"block": "delta", "i": 2, "j": 2},   # line away from the source
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="sweep_output", type=pathlib.Path)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    for kind, base in BASES.items():
        for parameter, grid in AXES.items():
            spec = sweep_from_dict({
                "schema_version": 1,
                "base": base,
                "axes": [{"parameter": parameter, "grid": grid}],
                "methods": ["closed", "numeric"],
                "quantities": QUANTITIES,
            })
            rows = run_sweep(spec)
            path = args.out_dir / f"{kind}_{parameter}.csv"
            with open(path, "w") as fh:
                write_sweep(rows, spec, fh)
            print(f"wrote {path} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
