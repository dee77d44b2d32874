"""Command-line front end.

Subcommands:

* ``eval``    -- one evaluation run on a train/test split.
* ``fewshot`` -- repeated seeded n-shot draws with a 95% confidence interval.
* ``compare`` -- lftc vs baseline-ncd on identical splits; reports the speed ratio.
* ``sweep``   -- grid over step-size / level / compressor cap; CSV summary.

Exit codes: 0 success, 2 validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import classifier, mcc
from .compression import CompressionError, make_backend
from .corpus import Corpus, DatasetError, load_csv
from .cr import KnnConfig
from .classifier import PipelineConfig, VARIANTS
from .mcc import SegmentPlan
from .report import EvalReport, write_csv_summary

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3

THREADS_ENV = "LFTC_THREADS"


def _column(value: str) -> str | int:
    return int(value) if value.lstrip("-").isdigit() else value


def _int_list(value: str) -> list[int]:
    items = [v for v in value.split(",") if v.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty list")
    return [int(v) for v in items]


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    return int(env) if env else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lftc",
        description="Compression-list text classification toolkit",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, variants=True):
        p.add_argument("--train", required=True, help="training CSV")
        p.add_argument("--test", required=True, help="test CSV")
        if variants:
            p.add_argument("--variant", choices=VARIANTS, default="lftc")
        p.add_argument("--step-size", type=_positive, default=65536,
                       help="bytes per dictionary segment (default 65536)")
        p.add_argument("--max-compressors", type=_positive, default=16,
                       help="cap per class; 0 disables via --no-cap")
        p.add_argument("--no-cap", action="store_true",
                       help="unlimited compressors per class")
        p.add_argument("--level", type=int, default=None,
                       help="compression level for the list backend")
        p.add_argument("--k", type=_positive, default=1, help="KNN neighbour count")
        p.add_argument("--threads", type=_positive, default=_default_threads(),
                       help=f"worker count (default 1 or ${THREADS_ENV})")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--backend", choices=("zstd", "reference-lz"), default="zstd",
                       help="dictionary backend for the compressor lists")
        p.add_argument("--dict-mode", choices=("trained", "raw"), default="trained")
        p.add_argument("--label-column", type=_column, default="label")
        p.add_argument("--text-column", type=_column, default="text")
        p.add_argument("--delimiter", default=",")
        p.add_argument("--out", type=Path, default=None, help="write the JSON report here")
        p.add_argument("--audit", type=Path, default=None,
                       help="write one JSON audit line per prediction")
        p.add_argument("--bundle", type=Path, default=None,
                       help="compressor-list bundle: reused when present, else written")

    p_eval = sub.add_parser("eval", help="single evaluation run")
    add_common(p_eval)

    p_few = sub.add_parser("fewshot", help="repeated few-shot trials")
    add_common(p_few)
    p_few.add_argument("--shots", type=_positive, default=5)
    p_few.add_argument("--trials", type=_positive, default=10)

    p_cmp = sub.add_parser("compare", help="lftc vs baseline-ncd timing on one split")
    add_common(p_cmp, variants=False)

    p_sweep = sub.add_parser("sweep", help="grid over step-size/level/cap")
    add_common(p_sweep)
    p_sweep.add_argument("--step-sizes", type=_int_list, default=None,
                         help="comma list; overrides --step-size")
    p_sweep.add_argument("--levels", type=_int_list, default=None,
                         help="comma list; overrides --level")
    p_sweep.add_argument("--caps", type=_int_list, default=None,
                         help="comma list; overrides --max-compressors")
    return parser


def _load_split(args):
    train = load_csv(args.train, args.label_column, args.text_column, args.delimiter)
    test = load_csv(args.test, args.label_column, args.text_column, args.delimiter)
    return train, test


def _config(args, variant=None) -> PipelineConfig:
    cap = None if args.no_cap else args.max_compressors
    return PipelineConfig(
        variant=variant or getattr(args, "variant", "lftc"),
        plan=SegmentPlan(step_size=args.step_size, max_compressors_per_class=cap),
        knn=KnnConfig(k=args.k),
        mcc_backend=make_backend(args.backend, args.level),
        threads=args.threads,
        dict_mode=args.dict_mode,
    )


def _emit(doc: dict, out: Path | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out is not None:
        out.write_text(text + "\n", encoding="utf-8")
    print(text)


def _write_audit(path: Path, predictions) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in predictions:
            fh.write(json.dumps({
                "sample_index": p.sample_index,
                "truth": p.truth,
                "predicted": p.predicted,
                "candidate_pair": (
                    {"first": p.candidate_pair.first, "second": p.candidate_pair.second}
                    if p.candidate_pair else None
                ),
                "neighbors": [
                    {"distance": n.distance, "label": n.label, "index": n.index}
                    for n in p.neighbors
                ],
                "tie": p.tie,
                "fallback": p.fallback,
                "error": p.error,
            }) + "\n")


def _fitted_pipeline(train, config, args) -> classifier.Pipeline:
    """Honour --bundle: reuse persisted compressor lists or persist fresh ones."""
    uses_lists = config.variant != "baseline-ncd"
    if args.bundle and args.bundle.exists() and uses_lists:
        lists, _plan = mcc.load_bundle(args.bundle, config.mcc_backend)
        return classifier.Pipeline(train, config, prebuilt_lists=lists)
    pipeline = classifier.Pipeline(train, config)
    if args.bundle and uses_lists:
        mcc.save_bundle(args.bundle, pipeline.lists, config.mcc_backend, config.plan)
    return pipeline


def run_eval(args) -> int:
    train, test = _load_split(args)
    config = _config(args)
    pipeline = _fitted_pipeline(train, config, args)
    report, preds, _ = classifier.evaluate_with_predictions(train, test, config, pipeline)
    if args.audit:
        _write_audit(args.audit, preds)
    _emit(report.to_dict(), args.out)
    return EXIT_OK


def run_fewshot(args) -> int:
    train, test = _load_split(args)
    config = _config(args)
    report = classifier.evaluate_fewshot(
        train, test, config, shots=args.shots, seed=args.seed, trials=args.trials
    )
    _emit(report.to_dict(), args.out)
    return EXIT_OK


def run_compare(args) -> int:
    train, test = _load_split(args)
    reports: dict[str, EvalReport] = {}
    head = Corpus(name="warmup", samples=test.samples[: min(10, len(test))])
    for variant in ("lftc", "baseline-ncd"):
        config = _config(args, variant=variant)
        # untimed warmup pass: the first compression-heavy run in a fresh
        # process is measurably slower (allocator growth, cpu ramp-up)
        classifier.evaluate(train, head, config)
        reports[variant] = classifier.evaluate(train, test, config)
    split = {
        "train_sha256": train.digest(),
        "test_sha256": test.digest(),
    }
    for variant, rep in reports.items():
        if rep.config["train_sha256"] != split["train_sha256"]:
            raise RuntimeError(f"{variant} ran on a different train split")
        if rep.config["test_sha256"] != split["test_sha256"]:
            raise RuntimeError(f"{variant} ran on a different test split")
    ratio = reports["baseline-ncd"].timings["total_seconds"] / max(
        reports["lftc"].timings["total_seconds"], 1e-9
    )
    doc = {
        "subcommand": "compare",
        "split": split,
        "speed_ratio_baseline_over_lftc": round(ratio, 3),
        "reports": {v: r.to_dict() for v, r in reports.items()},
    }
    _emit(doc, args.out)
    return EXIT_OK


def run_sweep(args) -> int:
    train, test = _load_split(args)
    step_sizes = args.step_sizes or [args.step_size]
    levels = args.levels or [args.level if args.level is not None else 3]
    caps = args.caps or ([None] if args.no_cap else [args.max_compressors])
    if not step_sizes or not levels or not caps:
        raise DatasetError("sweep grid is empty")
    reports = []
    for step in step_sizes:
        for level in levels:
            for cap in caps:
                config = PipelineConfig(
                    variant=args.variant,
                    plan=SegmentPlan(step_size=step, max_compressors_per_class=cap),
                    knn=KnnConfig(k=args.k),
                    mcc_backend=make_backend(args.backend, level),
                    threads=args.threads,
                    dict_mode=args.dict_mode,
                )
                reports.append(classifier.evaluate(train, test, config))
    out = args.out or Path("sweep.json")
    out.write_text(
        json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    csv_path = out.with_suffix(".csv")
    write_csv_summary(csv_path, reports)
    print(f"wrote {len(reports)} reports to {out} and {csv_path}")
    return EXIT_OK


_RUNNERS = {
    "eval": run_eval,
    "fewshot": run_fewshot,
    "compare": run_compare,
    "sweep": run_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _RUNNERS[args.subcommand](args)
    except (DatasetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (CompressionError, OSError, RuntimeError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
