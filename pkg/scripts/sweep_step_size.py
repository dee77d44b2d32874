#!/usr/bin/env python3
"""Step-size / level sweep on an arbitrary split, written as CSV.

Example:
    python scripts/sweep_step_size.py --train data/synthetic_train.csv \
        --test data/synthetic_test.csv --step-sizes 4096,16384,65536 --levels 1,3
"""

import argparse

from lftc.cli import main as cli_main


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--train", required=True)
    parser.add_argument("--test", required=True)
    parser.add_argument("--step-sizes", default="4096,16384,65536")
    parser.add_argument("--levels", default="1,3")
    parser.add_argument("--out", default="sweep.json")
    parser.add_argument("--threads", default="1")
    args = parser.parse_args()
    raise SystemExit(cli_main([
        "sweep",
        "--train", args.train,
        "--test", args.test,
        "--step-sizes", args.step_sizes,
        "--levels", args.levels,
        "--threads", args.threads,
        "--out", args.out,
    ]))


if __name__ == "__main__":
    main()
