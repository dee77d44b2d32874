"""Compressed-size oracles.

Three interchangeable backends expose ``compressed_size``:

* ``ZstdBackend`` -- Zstandard frames via the system libzstd; the only
  production backend that supports per-segment dictionaries.
* ``DeflateBackend`` -- zlib/DEFLATE containers; used for NCD distances.
* ``ReferenceLzBackend`` -- an in-repo, literal match/replace/entropy-code
  pipeline used to validate the scoring semantics at small scale.

The reference pipeline parses greedily: at each position the longest
earlier occurrence of the upcoming bytes (within a sliding window,
overlap allowed) is replaced by one token; tokens are keyed by the
substring they cover and charged their empirical Shannon cost.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

from . import zstd_bindings as zb

MIN_MATCH = 3
DEFAULT_REFERENCE_WINDOW = 32 * 1024
# Inputs at or above this size are compressed at the fast level when the
# adaptive rule is on.
ADAPTIVE_SIZE_CUTOFF = 64 * 1024
ADAPTIVE_FAST_LEVEL = 1

# Trained dictionaries: a lone segment is chunked into pseudo-samples for
# ZDICT, capacity clamped to [1 KiB, 110 KiB].
_ZDICT_CHUNKS = 64
_ZDICT_MIN_CAPACITY = 1024
_ZDICT_MAX_CAPACITY = 110 * 1024


class CompressionError(RuntimeError):
    """A backend failed; message carries the backend kind."""


class UnsupportedBackendError(CompressionError):
    """The requested operation needs a capability the backend lacks."""


class Backend(Protocol):
    kind: str

    def compressed_size(self, data: bytes) -> int: ...


@dataclass(frozen=True)
class ZstdBackend:
    """Zstandard backend. ``adaptive_level`` applies the input-size rule
    (fast level for inputs >= 64 KiB) to plain compression; dictionary
    compression always runs at the digested dictionary's level."""

    level: int = 3
    adaptive_level: bool = True
    kind: str = field(default="zstd", init=False)
    dictionary_capable: bool = field(default=True, init=False)

    def __post_init__(self):
        if not (zb.MIN_LEVEL <= self.level <= zb.MAX_LEVEL):
            raise ValueError(f"zstd level out of range: {self.level}")

    def effective_level(self, size: int) -> int:
        if self.adaptive_level and size >= ADAPTIVE_SIZE_CUTOFF:
            return min(self.level, ADAPTIVE_FAST_LEVEL)
        return self.level

    def compressed_size(self, data: bytes) -> int:
        _require_nonempty(data)
        try:
            return zb.compressed_size(data, self.effective_level(len(data)))
        except zb.ZstdError as exc:
            raise CompressionError(f"zstd: {exc}") from exc

    def compress(self, data: bytes) -> bytes:
        _require_nonempty(data)
        try:
            return zb.compress(data, self.effective_level(len(data)))
        except zb.ZstdError as exc:
            raise CompressionError(f"zstd: {exc}") from exc


@dataclass(frozen=True)
class DeflateBackend:
    """zlib container (RFC 1950); no dictionary support in this toolkit."""

    level: int = 6
    kind: str = field(default="deflate", init=False)
    dictionary_capable: bool = field(default=False, init=False)

    def __post_init__(self):
        if not (0 <= self.level <= 9):
            raise ValueError(f"deflate level out of range: {self.level}")

    def compressed_size(self, data: bytes) -> int:
        _require_nonempty(data)
        return len(self.compress(data))

    def compress(self, data: bytes) -> bytes:
        import zlib

        _require_nonempty(data)
        try:
            return zlib.compress(data, self.level)
        except zlib.error as exc:  # pragma: no cover - zlib does not fail on bytes
            raise CompressionError(f"deflate: {exc}") from exc


@dataclass(frozen=True)
class ReferenceLzBackend:
    """Literal implementation of the match/replace/entropy-code scoring."""

    window_bytes: int = DEFAULT_REFERENCE_WINDOW
    kind: str = field(default="reference-lz", init=False)
    dictionary_capable: bool = field(default=True, init=False)

    def __post_init__(self):
        if self.window_bytes < 1:
            raise ValueError("window_bytes must be >= 1")

    def compressed_size(self, data: bytes) -> int:
        _require_nonempty(data)
        # Clamp to 1: a backend size is never zero for non-empty input, even
        # when the token stream is a single repeated symbol.
        return max(1, ref_compress_size(b"", data, self.window_bytes))


BACKEND_KINDS = ("zstd", "deflate", "reference-lz")


def make_backend(kind: str, level: int | None = None, **kwargs) -> Backend:
    """Factory used by the CLI; ``level`` falls back to the backend default."""
    if kind == "zstd":
        return ZstdBackend(level=3 if level is None else level, **kwargs)
    if kind == "deflate":
        return DeflateBackend(level=6 if level is None else level)
    if kind == "reference-lz":
        return ReferenceLzBackend(**kwargs)
    raise ValueError(f"unknown backend kind: {kind!r} (expected one of {BACKEND_KINDS})")


@dataclass(frozen=True)
class SourceSpan:
    """Where a dictionary's bytes came from: a byte range of one class's
    concatenated training text. ``mode`` records whether ZDICT training
    succeeded ("trained") or the raw segment bytes were kept ("raw")."""

    class_id: str
    segment_index: int
    start: int
    stop: int
    mode: str = "raw"


@dataclass(frozen=True)
class TrainedDictionary:
    payload: bytes
    source_span: SourceSpan
    overhead_bytes: int = 0

    def __post_init__(self):
        if not self.payload:
            raise ValueError("dictionary payload must be non-empty")
        if self.source_span.start < 0 or self.source_span.stop <= self.source_span.start:
            raise ValueError("source span must be a non-empty byte range")


class DictCompressor:
    """Scores byte strings by their compressed size against one dictionary.

    For the zstd backend the dictionary is digested once (per level) and the
    digest is shared across threads; scoring is then a single C call.
    """

    def __init__(self, backend: Backend, dictionary: TrainedDictionary):
        if not getattr(backend, "dictionary_capable", False):
            raise UnsupportedBackendError(
                f"{backend.kind} backend does not support dictionaries"
            )
        self.backend = backend
        self.dictionary = dictionary
        self._cdicts: dict[int, zb.CDict] = {}

    def _cdict(self, level: int) -> zb.CDict:
        cd = self._cdicts.get(level)
        if cd is None:
            cd = zb.CDict(self.dictionary.payload, level)
            self._cdicts[level] = cd
        return cd

    def score(self, data: bytes) -> int:
        _require_nonempty(data)
        if isinstance(self.backend, ZstdBackend):
            level = self.backend.effective_level(len(data))
            try:
                size = zb.compressed_size_with_cdict(data, self._cdict(level))
            except zb.ZstdError as exc:
                raise CompressionError(f"zstd: {exc}") from exc
        else:
            size = max(
                1,
                ref_compress_size(
                    self.dictionary.payload, data, self.backend.window_bytes
                ),
            )
        return size + self.dictionary.overhead_bytes

    def compress(self, data: bytes) -> bytes:
        """Actual frame bytes; only meaningful for the zstd backend
        (round-trip and interoperability checks)."""
        if not isinstance(self.backend, ZstdBackend):
            raise UnsupportedBackendError(f"{self.backend.kind} has no payload format")
        _require_nonempty(data)
        return zb.compress_with_cdict(data, self._cdict(self.backend.effective_level(len(data))))


def compressed_size(backend: Backend, data: bytes) -> int:
    """Byte length of ``data`` under ``backend``; deterministic."""
    return backend.compressed_size(data)


def train_dictionary(
    backend: Backend,
    segment: bytes,
    span: SourceSpan,
    mode: str = "trained",
) -> TrainedDictionary:
    """Build a dictionary from one corpus segment.

    ``mode="trained"`` runs ZDICT and falls back to the raw segment bytes when
    the trainer refuses the segment (too small / too uniform); the fallback is
    recorded in the span's ``mode``. ``mode="raw"`` skips training entirely.
    The reference backend always keeps raw bytes (its dictionary is the
    window seed).
    """
    if not segment:
        raise ValueError("segment must be non-empty")
    if not getattr(backend, "dictionary_capable", False):
        raise UnsupportedBackendError(
            f"{backend.kind} backend does not support dictionaries"
        )
    if mode not in ("trained", "raw"):
        raise ValueError(f"unknown dictionary mode: {mode!r}")

    if mode == "trained" and isinstance(backend, ZstdBackend):
        payload = _zdict_train_segment(segment)
        if payload is not None:
            return TrainedDictionary(
                payload=payload,
                source_span=_with_mode(span, "trained"),
                overhead_bytes=0,
            )
    return TrainedDictionary(
        payload=segment, source_span=_with_mode(span, "raw"), overhead_bytes=0
    )


def _with_mode(span: SourceSpan, mode: str) -> SourceSpan:
    return SourceSpan(span.class_id, span.segment_index, span.start, span.stop, mode)


def _zdict_train_segment(segment: bytes) -> bytes | None:
    capacity = max(_ZDICT_MIN_CAPACITY, min(_ZDICT_MAX_CAPACITY, len(segment) // 4))
    chunk = max(256, len(segment) // _ZDICT_CHUNKS)
    samples = [segment[off : off + chunk] for off in range(0, len(segment), chunk)]
    if len(samples) < 5:  # ZDICT rejects tiny sample sets outright
        return None
    try:
        payload = zb.train_dictionary(samples, capacity)
    except zb.ZstdError:
        return None
    return payload or None


def dict_compressed_size(comp: DictCompressor, data: bytes) -> int:
    """Final per-compressor score: dictionary-compressed size plus the
    dictionary overhead term (0 under this artifact's accounting)."""
    return comp.score(data)


def ref_longest_match(window: bytes, text: bytes, position: int) -> tuple[int, int]:
    """Longest prefix of ``text[position:]`` occurring earlier in
    ``window + text[:position]``.

    Overlapping (self-referential) matches are allowed, so a run like
    ``aaaa`` matches itself at offset 1.  Returns ``(length, offset)`` with
    the offset counted backwards from the current position; ties on length
    prefer the smallest offset.  ``(0, 0)`` when no match reaches MIN_MATCH.
    """
    if not (0 <= position < len(text)):
        raise ValueError(f"position {position} out of range for text of length {len(text)}")
    buf = bytes(window) + bytes(text)
    return _longest_match(buf, len(window) + position, 0)


def _longest_match(buf: bytes, pos: int, lo: int) -> tuple[int, int]:
    """Longest match for buf[pos:] with source start in [lo, pos).

    Feasibility of a given length is monotone (a length-L occurrence yields a
    length-(L-1) one at the same start), so the maximal length is found by
    bisection over C-level ``find`` calls.
    """
    limit = len(buf) - pos
    if limit < MIN_MATCH or pos <= lo:
        return (0, 0)
    if buf.find(buf[pos : pos + MIN_MATCH], lo, pos + MIN_MATCH - 1) < 0:
        return (0, 0)
    low, high = MIN_MATCH, limit
    while low < high:
        mid = (low + high + 1) // 2
        if buf.find(buf[pos : pos + mid], lo, pos + mid - 1) >= 0:
            low = mid
        else:
            high = mid - 1
    start = buf.rfind(buf[pos : pos + low], lo, pos + low - 1)
    return (low, pos - start)


def reference_tokens(dictionary_bytes: bytes, data: bytes, window: int) -> list[bytes]:
    """Greedy left-to-right parse; each token is the substring it covers
    (a single byte for literals, >= MIN_MATCH bytes for matches)."""
    if not data:
        raise ValueError("data must be non-empty")
    if window < 1:
        raise ValueError("window must be >= 1")
    buf = bytes(dictionary_bytes) + bytes(data)
    out: list[bytes] = []
    i = len(dictionary_bytes)
    n = len(buf)
    while i < n:
        length, _offset = _longest_match(buf, i, max(0, i - window))
        if length >= MIN_MATCH:
            out.append(buf[i : i + length])
            i += length
        else:
            out.append(buf[i : i + 1])
            i += 1
    return out


def ref_entropy_coded_size(tokens: Sequence | Iterable) -> float:
    """Shannon lower bound, in bits, of the token stream under its own
    empirical distribution: sum over occurrences of -log2 p(token)."""
    counts = Counter(tokens)
    total = sum(counts.values())
    if total == 0:
        raise ValueError("token stream must be non-empty")
    log_total = math.log2(total)
    return sum(c * (log_total - math.log2(c)) for c in counts.values())


def ref_compress_size(dictionary_bytes: bytes, data: bytes, window: int = DEFAULT_REFERENCE_WINDOW) -> int:
    """Reference pipeline size in bytes: greedy parse, then the entropy-coded
    bit count rounded up to whole bytes.  Degenerate single-symbol streams
    legitimately cost zero bits."""
    return math.ceil(ref_entropy_coded_size(reference_tokens(dictionary_bytes, data, window)) / 8)


def ncd(backend: Backend, x: bytes, y: bytes) -> float:
    """Normalized compression distance with C(.) = backend compressed size;
    the pair is concatenated with no separator."""
    _require_nonempty(x)
    _require_nonempty(y)
    cx = backend.compressed_size(x)
    cy = backend.compressed_size(y)
    cxy = backend.compressed_size(x + y)
    return ncd_value(cxy, cx, cy)


def ncd_value(c_xy: int, c_x: int, c_y: int) -> float:
    """The distance formula itself, usable with precomputed sizes."""
    return (c_xy - min(c_x, c_y)) / max(c_x, c_y)


def _require_nonempty(data: bytes) -> None:
    if not data:
        raise ValueError("data must be non-empty")
