"""Multi-compressor classification stage.

Builds one ordered list of dictionary compressors per class (the class's
concatenated training text sliced into fixed-size segments, one dictionary
per segment) and scores queries by summing their dictionary-compressed
sizes per list. The two lowest-scoring classes form the candidate pair
handed to the reasoning stage.

Per-class scores are plain sums over the list, so lists are only directly
comparable when every class has the same number of compressors; pick
step_size and the cap so all classes reach the cap (or produce a single
segment) on unbalanced corpora.
"""

from __future__ import annotations

import base64
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .compression import (
    Backend,
    DictCompressor,
    SourceSpan,
    TrainedDictionary,
    dict_compressed_size,
    make_backend,
    train_dictionary,
)
from .corpus import DEFAULT_SEPARATOR, Corpus, LabeledText, concat_class_text

BUNDLE_FORMAT = "lftc-compressor-bundle"
BUNDLE_VERSION = 1


class DegenerateCorpusError(ValueError):
    """Fewer than two classes: candidate selection is impossible."""


@dataclass(frozen=True)
class SegmentPlan:
    """Segmenting policy: bytes per segment and an optional cap on the number
    of compressors per class (capped lists keep evenly spaced segments)."""

    step_size: int = 65536
    max_compressors_per_class: int | None = 16

    def __post_init__(self):
        if self.step_size < 1:
            raise ValueError("step_size must be >= 1")
        cap = self.max_compressors_per_class
        if cap is not None and cap < 1:
            raise ValueError("max_compressors_per_class must be >= 1 or None")


@dataclass(frozen=True)
class ClassScore:
    class_id: str
    score: int


@dataclass(frozen=True)
class CandidatePair:
    first: str
    second: str
    scores: tuple[ClassScore, ...]

    def __post_init__(self):
        if self.first == self.second:
            raise ValueError("candidate pair must hold two distinct classes")


@dataclass(frozen=True)
class ClassCompressorList:
    class_id: str
    compressors: tuple[DictCompressor, ...]
    segment_count: int

    def __post_init__(self):
        if not self.compressors:
            raise ValueError(f"class {self.class_id!r} has an empty compressor list")


def segment_count(total_len: int, step_size: int) -> int:
    """ceil(total_len / step_size)."""
    if total_len < 1:
        raise ValueError("total_len must be >= 1")
    if step_size < 1:
        raise ValueError("step_size must be >= 1")
    return -(-total_len // step_size)


def _segment_indices(n_full: int, cap: int | None) -> list[int]:
    if cap is None or n_full <= cap:
        return list(range(n_full))
    # Evenly spaced over the full span; strictly increasing since cap <= n_full.
    return [(i * n_full) // cap for i in range(cap)]


def build_class_list(
    corpus: Corpus,
    class_id: str,
    plan: SegmentPlan,
    backend: Backend,
    separator: bytes = DEFAULT_SEPARATOR,
    dict_mode: str = "trained",
) -> ClassCompressorList:
    """Slice the class's concatenated text into step_size segments (the last
    one may be shorter) and train one dictionary per kept segment."""
    text = concat_class_text(corpus, class_id, separator)
    n_full = segment_count(len(text), plan.step_size)
    indices = _segment_indices(n_full, plan.max_compressors_per_class)
    compressors = []
    for segment_index in indices:
        start = segment_index * plan.step_size
        stop = min(len(text), start + plan.step_size)
        span = SourceSpan(class_id, segment_index, start, stop)
        dictionary = train_dictionary(backend, text[start:stop], span, mode=dict_mode)
        compressors.append(DictCompressor(backend, dictionary))
    return ClassCompressorList(
        class_id=class_id, compressors=tuple(compressors), segment_count=len(indices)
    )


def build_all_lists(
    corpus: Corpus,
    plan: SegmentPlan,
    backend: Backend,
    separator: bytes = DEFAULT_SEPARATOR,
    dict_mode: str = "trained",
    threads: int = 1,
) -> dict[str, ClassCompressorList]:
    """One compressor list per class. Classes are independent, so they may be
    built in parallel; the result is identical either way."""
    classes = sorted(corpus.classes)

    def build(class_id: str) -> ClassCompressorList:
        try:
            return build_class_list(corpus, class_id, plan, backend, separator, dict_mode)
        except Exception as exc:
            raise type(exc)(f"class {class_id!r}: {exc}") from exc

    if threads > 1 and len(classes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            built = list(pool.map(build, classes))
    else:
        built = [build(c) for c in classes]
    return {cl.class_id: cl for cl in built}


def score_query(
    lists: dict[str, ClassCompressorList], query: bytes | LabeledText
) -> list[ClassScore]:
    """Sum of dictionary-compressed sizes per class, all classes, sorted by
    class id for a stable audit trail."""
    if not lists:
        raise ValueError("no compressor lists")
    data = query.text if isinstance(query, LabeledText) else query
    if not data:
        raise ValueError("query text must be non-empty")
    return [
        ClassScore(class_id, sum(dict_compressed_size(c, data) for c in lists[class_id].compressors))
        for class_id in sorted(lists)
    ]


def select_candidates(scores: list[ClassScore]) -> CandidatePair:
    """Two lowest-scoring classes; ties break lexicographically on class id."""
    if len(scores) < 2:
        raise DegenerateCorpusError(
            f"need at least 2 scored classes, got {len(scores)}"
        )
    ordered = sorted(scores, key=lambda s: (s.score, s.class_id))
    return CandidatePair(ordered[0].class_id, ordered[1].class_id, tuple(scores))


def save_bundle(path, lists: dict[str, ClassCompressorList], backend: Backend, plan: SegmentPlan) -> None:
    """Persist dictionary payloads so repeated runs skip reconstruction.
    Versioned JSON container; not a cross-version stability promise."""
    doc = {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "backend": {"kind": backend.kind, "level": getattr(backend, "level", None)},
        "plan": {
            "step_size": plan.step_size,
            "max_compressors_per_class": plan.max_compressors_per_class,
        },
        "classes": [
            {
                "class": cl.class_id,
                "segment_count": cl.segment_count,
                "segments": [
                    {
                        "index": c.dictionary.source_span.segment_index,
                        "start": c.dictionary.source_span.start,
                        "stop": c.dictionary.source_span.stop,
                        "mode": c.dictionary.source_span.mode,
                        "overhead_bytes": c.dictionary.overhead_bytes,
                        "payload": base64.b64encode(c.dictionary.payload).decode("ascii"),
                    }
                    for c in cl.compressors
                ],
            }
            for _, cl in sorted(lists.items())
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_bundle(path, backend: Backend | None = None) -> tuple[dict[str, ClassCompressorList], SegmentPlan]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != BUNDLE_FORMAT:
        raise ValueError(f"{path}: not a compressor bundle")
    if doc.get("version") != BUNDLE_VERSION:
        raise ValueError(f"{path}: unsupported bundle version {doc.get('version')}")
    if backend is None:
        meta = doc["backend"]
        backend = make_backend(meta["kind"], meta["level"])
    lists: dict[str, ClassCompressorList] = {}
    for entry in doc["classes"]:
        compressors = []
        for seg in entry["segments"]:
            span = SourceSpan(entry["class"], seg["index"], seg["start"], seg["stop"], seg["mode"])
            dictionary = TrainedDictionary(
                payload=base64.b64decode(seg["payload"]),
                source_span=span,
                overhead_bytes=seg["overhead_bytes"],
            )
            compressors.append(DictCompressor(backend, dictionary))
        lists[entry["class"]] = ClassCompressorList(
            class_id=entry["class"],
            compressors=tuple(compressors),
            segment_count=entry["segment_count"],
        )
    plan = SegmentPlan(
        step_size=doc["plan"]["step_size"],
        max_compressors_per_class=doc["plan"]["max_compressors_per_class"],
    )
    return lists, plan
