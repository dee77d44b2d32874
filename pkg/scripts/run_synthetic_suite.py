#!/usr/bin/env python3
"""Full experiment sweep on the bundled synthetic corpus.

Runs every pipeline variant, prints an accuracy/timing table, and repeats
the lftc-vs-baseline speed comparison a few times for a stable ratio.
"""

import argparse
import statistics
import time
from pathlib import Path

from lftc.classifier import PipelineConfig, evaluate
from lftc.corpus import load_csv
from lftc.mcc import SegmentPlan

DATA = Path(__file__).resolve().parent.parent / "data"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--repeats", type=int, default=3, help="timing repeats")
    parser.add_argument("--step-size", type=int, default=65536)
    parser.add_argument("--dict-mode", choices=("trained", "raw"), default="raw")
    args = parser.parse_args()

    train = load_csv(DATA / "synthetic_train.csv")
    test = load_csv(DATA / "synthetic_test.csv")
    print(f"train: {len(train)} docs / {len(train.classes)} classes; test: {len(test)} docs")

    print(f"\n{'variant':14s} {'accuracy':>8s} {'build':>7s} {'total':>7s}")
    totals = {}
    for variant in ("lftc", "lftc-mcc", "lftc-cr", "baseline-ncd"):
        config = PipelineConfig(
            variant=variant,
            plan=SegmentPlan(step_size=args.step_size),
            threads=args.threads,
            dict_mode=args.dict_mode,
        )
        report = evaluate(train, test, config)
        totals[variant] = report.timings["total_seconds"]
        print(
            f"{variant:14s} {report.accuracy:8.3f} "
            f"{report.timings['list_build_seconds']:7.2f} {report.timings['total_seconds']:7.2f}"
        )

    ratios = []
    for _ in range(args.repeats):
        t = {}
        for variant in ("lftc", "baseline-ncd"):
            config = PipelineConfig(variant=variant, threads=args.threads, dict_mode=args.dict_mode)
            t[variant] = evaluate(train, test, config).timings["total_seconds"]
        ratios.append(t["baseline-ncd"] / t["lftc"])
    print(
        f"\nspeed ratio baseline/lftc over {args.repeats} repeats: "
        f"median {statistics.median(ratios):.2f} (all: {', '.join(f'{r:.2f}' for r in ratios)})"
    )


if __name__ == "__main__":
    main()
