"""Labeled text corpora: CSV loading, class concatenation, few-shot draws.

Everything downstream is byte-oriented, so texts are stored as bytes
(UTF-8 with surrogate escapes, which keeps CSV round-trips lossless even
for non-UTF-8 input). Corpora are immutable after construction and safe
to share across worker threads.
"""

from __future__ import annotations

import csv
import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

DEFAULT_SEPARATOR = b"\n"


class DatasetError(ValueError):
    """Bad input data: missing files, malformed rows, infeasible requests."""


@dataclass(frozen=True)
class LabeledText:
    label: str
    text: bytes

    def __post_init__(self):
        if not self.label:
            raise DatasetError("label must be non-empty")
        if not self.text:
            raise DatasetError("text must be non-empty")


@dataclass(frozen=True)
class Corpus:
    name: str
    samples: tuple[LabeledText, ...]

    def __post_init__(self):
        if not self.samples:
            raise DatasetError(f"corpus {self.name!r} has no samples")

    @property
    def classes(self) -> frozenset[str]:
        return frozenset(s.label for s in self.samples)

    def __len__(self) -> int:
        return len(self.samples)

    def by_class(self) -> dict[str, list[int]]:
        """Class -> sample indices, in corpus order."""
        out: dict[str, list[int]] = {}
        for i, s in enumerate(self.samples):
            out.setdefault(s.label, []).append(i)
        return out

    def digest(self) -> str:
        """Order-sensitive checksum of the full sample list."""
        h = hashlib.sha256()
        for s in self.samples:
            lab = s.label.encode("utf-8", "surrogateescape")
            h.update(struct.pack("<II", len(lab), len(s.text)))
            h.update(lab)
            h.update(s.text)
        return h.hexdigest()


@dataclass(frozen=True)
class FewShotSpec:
    shots: int
    seed: int
    trials: int = 1

    def __post_init__(self):
        if self.shots < 1:
            raise DatasetError("shots must be >= 1")
        if self.trials < 1:
            raise DatasetError("trials must be >= 1")


def load_csv(
    path,
    label_column: str | int = "label",
    text_column: str | int = "text",
    delimiter: str = ",",
    name: str | None = None,
) -> Corpus:
    """Load a two-column-or-more CSV into a Corpus.

    Columns are addressed by header name (a header row is then required) or
    by zero-based index (the file is then read as headerless). Quoting per
    RFC 4180; rows with missing/blank label or text are rejected with their
    record number.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"dataset file not found: {path}")
    positional = isinstance(label_column, int) and isinstance(text_column, int)

    samples: list[LabeledText] = []
    with open(path, newline="", encoding="utf-8", errors="surrogateescape") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        if positional:
            label_idx, text_idx = label_column, text_column
        else:
            try:
                header = next(reader)
            except StopIteration:
                raise DatasetError(f"{path}: empty file") from None
            label_idx = _resolve_column(header, label_column, path)
            text_idx = _resolve_column(header, text_column, path)
        for row_no, row in enumerate(reader, start=2 if not positional else 1):
            if not row:
                continue
            if max(label_idx, text_idx) >= len(row):
                raise DatasetError(
                    f"{path}: row {row_no} has {len(row)} fields, "
                    f"need column {max(label_idx, text_idx)}"
                )
            label = row[label_idx].strip()
            text = row[text_idx]
            if not label:
                raise DatasetError(f"{path}: row {row_no} has an empty label")
            if not text.strip():
                raise DatasetError(f"{path}: row {row_no} has an empty text field")
            samples.append(LabeledText(label, text.encode("utf-8", "surrogateescape")))
    if not samples:
        raise DatasetError(f"{path}: no data rows")
    return Corpus(name=name or path.stem, samples=tuple(samples))


def _resolve_column(header: list[str], column: str | int, path) -> int:
    if isinstance(column, int):
        if column >= len(header):
            raise DatasetError(f"{path}: column index {column} out of range")
        return column
    try:
        return header.index(column)
    except ValueError:
        raise DatasetError(f"{path}: no column named {column!r} in header {header}") from None


def save_csv(corpus: Corpus, path, delimiter: str = ",") -> None:
    """Write with a `label,text` header; inverse of load_csv."""
    with open(path, "w", newline="", encoding="utf-8", errors="surrogateescape") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow(["label", "text"])
        for s in corpus.samples:
            writer.writerow([s.label, s.text.decode("utf-8", "surrogateescape")])


def concat_class_text(corpus: Corpus, class_id: str, separator: bytes = DEFAULT_SEPARATOR) -> bytes:
    """All texts of one class, corpus order, joined by ``separator``."""
    if class_id not in corpus.classes:
        raise DatasetError(f"unknown class {class_id!r} in corpus {corpus.name!r}")
    return separator.join(s.text for s in corpus.samples if s.label == class_id)


def _draw_rank(seed: int, trial_index: int, class_id: str, sample_index: int) -> bytes:
    # Keyed PRF: stable across platforms and library versions.
    key = struct.pack("<qq", seed, trial_index)
    h = hashlib.blake2b(digest_size=8, key=key)
    h.update(class_id.encode("utf-8", "surrogateescape"))
    h.update(b"\x00")
    h.update(struct.pack("<q", sample_index))
    return h.digest()


def few_shot_sample(corpus: Corpus, spec: FewShotSpec, trial_index: int = 0) -> Corpus:
    """Draw exactly ``spec.shots`` samples per class, without replacement.

    The draw is a pure function of (seed, trial_index, class): each sample is
    ranked by a keyed hash and the lowest ranks win, so equal inputs always
    select identical samples and distinct trials are independent.
    """
    if not (0 <= trial_index < spec.trials):
        raise DatasetError(f"trial_index {trial_index} outside [0, {spec.trials})")
    selected: list[int] = []
    for class_id, indices in sorted(corpus.by_class().items()):
        if len(indices) < spec.shots:
            raise DatasetError(
                f"class {class_id!r} has {len(indices)} samples, "
                f"fewer than shots={spec.shots}"
            )
        ranked = sorted(indices, key=lambda i: (_draw_rank(spec.seed, trial_index, class_id, i), i))
        selected.extend(ranked[: spec.shots])
    selected.sort()
    return Corpus(
        name=f"{corpus.name}@{spec.shots}shot.t{trial_index}",
        samples=tuple(corpus.samples[i] for i in selected),
    )
