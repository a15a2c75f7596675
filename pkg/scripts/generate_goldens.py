"""Regenerate the CLI golden outputs under tests/golden/.

Run from the repository root after an intentional report-format change:
    python scripts/generate_goldens.py
"""

from __future__ import annotations

import pathlib
import sys

from projchan import cli

GOLDEN = pathlib.Path(__file__).resolve().parents[1] / "tests" / "golden"

CASES = {
    "validate_wh3.json": ["validate", "--spec", "wh:d=3"],
    "zoo_wh3.json": ["zoo", "--spec", "wh:d=3"],
    "minent_wh3_a1.json": ["minent", "--spec", "wh:d=3", "--alpha", "1", "--starts", "4"],
    "norm_wh3.json": ["norm", "--spec", "wh:d=3", "--starts", "4"],
    "characterize_wh3.json": ["characterize", "--spec", "wh:d=3", "--alphas", "0,1,2,inf", "--starts", "4"],
    "additivity_wh3_pair_a2.json": ["additivity", "--spec", "wh:d=3", "--spec", "wh:d=3",
                                    "--alpha", "2", "--starts", "4"],
    "capacity_weyl3.json": ["capacity", "--spec", "weyl:d=3", "--group", "auto", "--starts", "4"],
    "covariance_weyl3.json": ["covariance", "--spec", "weyl:d=3", "--group", "auto"],
    "eof_example9.json": ["eof", "--state", "example9", "--starts", "4"],
    "dilate_wh3.json": ["dilate", "--spec", "wh:d=3"],
    "minent_wh3_a1.csv": ["minent", "--spec", "wh:d=3", "--alpha", "1", "--starts", "4",
                          "--format", "csv"],
}


def main() -> int:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, argv in CASES.items():
        out = GOLDEN / name
        code = cli.main(argv + ["--out", str(out)])
        if code != 0:
            print(f"FAILED ({code}): {name}", file=sys.stderr)
            return 1
        print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
