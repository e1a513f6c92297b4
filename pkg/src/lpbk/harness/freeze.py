"""Refit and freeze the regression constants of the fitted checks.

Run ``python -m lpbk.harness.freeze`` after changing a fitted check; the
result is written to ``frozen_constants.json`` next to this module and
committed.  The test-suite refits from the same recipe and compares.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from ..io import dumps_canonical
from ..spectral import GridSpec
from .checks import _jsonable, canonical_params
from .families import FunctionFamily
from .fitting import MARGIN, fit_constant

GRID = GridSpec(1, 256)

RECIPES = {
    "phi_independence": {
        "params": {},
        "calibration": FunctionFamily("default", 1, 20, GRID),
        "validation": FunctionFamily("default", 2, 20, GRID),
    },
    "holder_equiv": {
        "params": {"s": 0.5},
        "calibration": FunctionFamily("default", 1, 20, GRID),
        "validation": FunctionFamily("default", 2, 20, GRID),
    },
    "fs_maximal": {
        "params": {"p": 2, "q": 2},
        "calibration": FunctionFamily("random_families", 1, 50, GRID),
        "validation": FunctionFamily("random_families", 2, 50, GRID),
    },
}

FROZEN_PATH = Path(__file__).with_name("frozen_constants.json")


def refit(check: str):
    r = RECIPES[check]
    return fit_constant(check, r["calibration"], r["validation"], r["params"])


def build_table() -> dict:
    table = {}
    for check, r in RECIPES.items():
        res = refit(check)
        table[check] = {
            "params": _jsonable(canonical_params(check, r["params"])),
            "calibration": r["calibration"].to_dict(),
            "validation": r["validation"].to_dict(),
            "margin": MARGIN,
            "calibration_max_ratio": res.calibration.summary["max_ratio"],
            "calibration_min_ratio": res.calibration.summary["min_ratio"],
            "constant": res.constant,
        }
    return table


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=FROZEN_PATH)
    args = ap.parse_args(argv)
    args.out.write_text(dumps_canonical(build_table()) + "\n")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
