"""End-to-end pipelines and batch evaluation.

Variants:

* ``lftc``         -- compressor-list scoring, two-candidate shortlist, NCD-KNN.
* ``lftc-mcc``     -- ablation: one whole-class dictionary per class instead of
                      a segment list; reasoning stage unchanged.
* ``lftc-cr``      -- ablation: no reasoning stage; the lowest-scoring class wins.
* ``baseline-ncd`` -- single-compressor NCD-KNN over the entire training set.

A pipeline is fitted once per (train corpus, config) and reused for every
query; fitted state is read-only, so evaluation parallelizes over test
samples with bit-identical results at any worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from . import cr, mcc
from .compression import Backend, ZstdBackend
from .corpus import DEFAULT_SEPARATOR, Corpus
from .report import EvalReport, confidence_interval
from .mcc import CandidatePair, DegenerateCorpusError, SegmentPlan

VARIANTS = ("lftc", "lftc-mcc", "lftc-cr", "baseline-ncd")

# The whole-class dictionary of the lftc-mcc ablation is built from at most
# this many bytes of the class's concatenated text.
WHOLE_CLASS_DICT_LIMIT = 1 << 20


@dataclass(frozen=True)
class PipelineConfig:
    variant: str = "lftc"
    plan: SegmentPlan = field(default_factory=SegmentPlan)
    knn: cr.KnnConfig = field(default_factory=cr.KnnConfig)
    mcc_backend: Backend = field(default_factory=ZstdBackend)
    threads: int = 1
    separator: bytes = DEFAULT_SEPARATOR
    dict_mode: str = "trained"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass(frozen=True)
class Prediction:
    sample_index: int
    predicted: str
    truth: str | None
    candidate_pair: CandidatePair | None
    elapsed: float
    ncd_calls: int = 0
    mcc_seconds: float = 0.0
    cr_seconds: float = 0.0
    fallback: bool = False
    tie: bool = False
    neighbors: tuple[cr.NcdNeighbor, ...] = ()
    error: str | None = None


class Pipeline:
    """Fitted classifier; ``predict`` is a pure function of the query."""

    def __init__(
        self,
        train: Corpus,
        config: PipelineConfig,
        prebuilt_lists: dict[str, mcc.ClassCompressorList] | None = None,
    ):
        self.train = train
        self.config = config
        self.classes = sorted(train.classes)
        t0 = time.perf_counter()
        self.lists: dict[str, mcc.ClassCompressorList] | None = None
        if config.variant == "baseline-ncd":
            pass
        elif prebuilt_lists is not None:
            missing = set(self.classes) - set(prebuilt_lists)
            if missing:
                raise ValueError(f"prebuilt lists are missing classes: {sorted(missing)}")
            self.lists = prebuilt_lists
        elif config.variant in ("lftc", "lftc-cr"):
            self.lists = mcc.build_all_lists(
                train, config.plan, config.mcc_backend,
                separator=config.separator, dict_mode=config.dict_mode,
                threads=config.threads,
            )
        elif config.variant == "lftc-mcc":
            # One dictionary per class, trained on the first dictionary-limit
            # bytes of the whole concatenated class text.
            single = SegmentPlan(step_size=WHOLE_CLASS_DICT_LIMIT, max_compressors_per_class=1)
            self.lists = mcc.build_all_lists(
                train, single, config.mcc_backend,
                separator=config.separator, dict_mode=config.dict_mode,
                threads=config.threads,
            )
        # Memoized per-sample self-compression sizes for the NCD stage; shared
        # by all variants that reach it so comparisons stay apples-to-apples.
        self._size_cache: dict[bytes, int] = {}
        if config.variant == "baseline-ncd":
            for s in train.samples:
                if s.text not in self._size_cache:
                    self._size_cache[s.text] = config.knn.backend.compressed_size(s.text)
        self.list_build_seconds = time.perf_counter() - t0

    def predict(self, text: bytes, sample_index: int = 0, truth: str | None = None) -> Prediction:
        t_start = time.perf_counter()
        try:
            if self.config.variant == "baseline-ncd":
                return self._predict_baseline(text, sample_index, truth, t_start)
            return self._predict_listwise(text, sample_index, truth, t_start)
        except Exception as exc:
            # Runtime failures count as incorrect, never abort the run.
            return Prediction(
                sample_index=sample_index,
                predicted="",
                truth=truth,
                candidate_pair=None,
                elapsed=time.perf_counter() - t_start,
                error=f"{type(exc).__name__}: {exc}",
            )

    def _predict_listwise(self, text, sample_index, truth, t_start) -> Prediction:
        assert self.lists is not None
        scores = mcc.score_query(self.lists, text)
        try:
            pair = mcc.select_candidates(scores)
        except DegenerateCorpusError:
            # Single-class corpus: flag and return the only class.
            t_mid = time.perf_counter()
            return Prediction(
                sample_index=sample_index,
                predicted=scores[0].class_id,
                truth=truth,
                candidate_pair=None,
                elapsed=t_mid - t_start,
                mcc_seconds=t_mid - t_start,
                fallback=True,
            )
        t_mid = time.perf_counter()

        if self.config.variant == "lftc-cr":
            return Prediction(
                sample_index=sample_index,
                predicted=pair.first,
                truth=truth,
                candidate_pair=pair,
                elapsed=t_mid - t_start,
                mcc_seconds=t_mid - t_start,
            )

        outcome = cr.reason_detail(self.train, pair, text, self.config.knn, self._size_cache)
        t_end = time.perf_counter()
        return Prediction(
            sample_index=sample_index,
            predicted=outcome.label,
            truth=truth,
            candidate_pair=pair,
            elapsed=t_end - t_start,
            ncd_calls=outcome.ncd_calls,
            mcc_seconds=t_mid - t_start,
            cr_seconds=t_end - t_mid,
            fallback=outcome.fallback,
            tie=outcome.tie,
            neighbors=outcome.neighbors,
        )

    def _predict_baseline(self, text, sample_index, truth, t_start) -> Prediction:
        if not text:
            raise ValueError("query text must be non-empty")
        neighbors = cr.sample_distances(text, self.train.samples, self.config.knn, self._size_cache)
        outcome = cr.vote_detail(neighbors, self.config.knn)
        t_end = time.perf_counter()
        return Prediction(
            sample_index=sample_index,
            predicted=outcome.label,
            truth=truth,
            candidate_pair=None,
            elapsed=t_end - t_start,
            ncd_calls=len(neighbors),
            cr_seconds=t_end - t_start,
            tie=outcome.tie,
            neighbors=outcome.neighbors,
        )


def predict_lftc(train: Corpus, test_text: bytes, config: PipelineConfig | None = None) -> Prediction:
    """One-shot convenience wrapper; for many queries fit a Pipeline once."""
    config = replace(config or PipelineConfig(), variant="lftc")
    return Pipeline(train, config).predict(test_text)


def predict_ablation_mcc(train: Corpus, test_text: bytes, config: PipelineConfig | None = None) -> Prediction:
    config = replace(config or PipelineConfig(), variant="lftc-mcc")
    return Pipeline(train, config).predict(test_text)


def predict_ablation_cr(train: Corpus, test_text: bytes, config: PipelineConfig | None = None) -> Prediction:
    config = replace(config or PipelineConfig(), variant="lftc-cr")
    return Pipeline(train, config).predict(test_text)


def predict_baseline_ncd(train: Corpus, test_text: bytes, config: PipelineConfig | None = None) -> Prediction:
    config = replace(config or PipelineConfig(), variant="baseline-ncd")
    return Pipeline(train, config).predict(test_text)


def predict_corpus(
    train: Corpus, test: Corpus, config: PipelineConfig, pipeline: Pipeline | None = None
) -> tuple[list[Prediction], Pipeline]:
    """All test predictions, ordered by sample index regardless of workers."""
    pipeline = pipeline or Pipeline(train, config)
    items = list(enumerate(test.samples))

    def run(item):
        i, sample = item
        return pipeline.predict(sample.text, sample_index=i, truth=sample.label)

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            preds = list(pool.map(run, items))
    else:
        preds = [run(it) for it in items]
    preds.sort(key=lambda p: p.sample_index)
    return preds, pipeline


def evaluate(
    train: Corpus, test: Corpus, config: PipelineConfig, pipeline: Pipeline | None = None
) -> EvalReport:
    """Run the configured variant over the whole test corpus."""
    report, _preds, _pipeline = evaluate_with_predictions(train, test, config, pipeline)
    return report


def evaluate_with_predictions(
    train: Corpus, test: Corpus, config: PipelineConfig, pipeline: Pipeline | None = None
) -> tuple[EvalReport, list[Prediction], Pipeline]:
    """evaluate() plus the per-sample predictions (audit, determinism checks)."""
    if not (train.classes & test.classes):
        raise ValueError("train and test label sets do not overlap")
    t0 = time.perf_counter()
    preds, pipeline = predict_corpus(train, test, config, pipeline)
    total_seconds = time.perf_counter() - t0

    correct = sum(1 for p in preds if p.error is None and p.predicted == p.truth)
    per_class_total: dict[str, int] = {}
    per_class_correct: dict[str, int] = {}
    for p in preds:
        per_class_total[p.truth] = per_class_total.get(p.truth, 0) + 1
        if p.error is None and p.predicted == p.truth:
            per_class_correct[p.truth] = per_class_correct.get(p.truth, 0) + 1
    per_class = {
        c: per_class_correct.get(c, 0) / n for c, n in sorted(per_class_total.items())
    }
    errors = sum(1 for p in preds if p.error is not None)

    report = EvalReport(
        dataset=test.name,
        variant=config.variant,
        config=config_echo(config, train, test),
        accuracy=correct / len(preds),
        per_class=per_class,
        timings={
            "list_build_seconds": pipeline.list_build_seconds,
            "mcc_seconds": sum(p.mcc_seconds for p in preds),
            "cr_seconds": sum(p.cr_seconds for p in preds),
            "total_seconds": total_seconds,
        },
        errors=errors,
    )
    return report, preds, pipeline


def config_echo(config: PipelineConfig, train: Corpus, test: Corpus | None = None) -> dict:
    """Full run configuration for the report."""
    echo = {
        "variant": config.variant,
        "step_size": config.plan.step_size,
        "max_compressors": config.plan.max_compressors_per_class,
        "mcc_backend": {
            "kind": config.mcc_backend.kind,
            "level": getattr(config.mcc_backend, "level", None),
        },
        "ncd_backend": {
            "kind": config.knn.backend.kind,
            "level": getattr(config.knn.backend, "level", None),
        },
        "k": config.knn.k,
        "threads": config.threads,
        "dict_mode": config.dict_mode,
        "separator": config.separator.decode("utf-8", "backslashreplace"),
        "train_dataset": train.name,
        "train_size": len(train),
        "train_sha256": train.digest(),
    }
    if test is not None:
        echo["test_size"] = len(test)
        echo["test_sha256"] = test.digest()
    return echo


def evaluate_fewshot(
    train: Corpus,
    test: Corpus,
    config: PipelineConfig,
    shots: int,
    seed: int,
    trials: int,
) -> EvalReport:
    """Repeated seeded few-shot draws; mean accuracy with a normal-approx
    95% interval when there are at least two trials."""
    from .corpus import FewShotSpec, few_shot_sample

    spec = FewShotSpec(shots=shots, seed=seed, trials=trials)
    accs: list[float] = []
    reports: list[EvalReport] = []
    for trial in range(trials):
        sub = few_shot_sample(train, spec, trial)
        rep = evaluate(sub, test, config)
        accs.append(rep.accuracy)
        reports.append(rep)
    mean_acc = sum(accs) / len(accs)
    timings = {
        key: sum(r.timings[key] for r in reports)
        for key in ("list_build_seconds", "mcc_seconds", "cr_seconds", "total_seconds")
    }
    echo = config_echo(config, train, test)
    echo.update({"shots": shots, "seed": seed, "trials": trials})
    return EvalReport(
        dataset=test.name,
        variant=config.variant,
        config=echo,
        accuracy=mean_acc,
        per_class=_mean_per_class(reports),
        timings=timings,
        trials=accs,
        ci95=confidence_interval(accs) if trials >= 2 else None,
        errors=sum(r.errors for r in reports),
    )


def _mean_per_class(reports: list[EvalReport]) -> dict[str, float]:
    keys = sorted({c for r in reports for c in r.per_class})
    return {
        c: sum(r.per_class.get(c, 0.0) for r in reports) / len(reports) for c in keys
    }
