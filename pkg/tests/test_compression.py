import math
import random
import zlib

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lftc import zstd_bindings as zb
from lftc.compression import (
    DEFAULT_REFERENCE_WINDOW,
    DeflateBackend,
    DictCompressor,
    ReferenceLzBackend,
    SourceSpan,
    TrainedDictionary,
    UnsupportedBackendError,
    ZstdBackend,
    compressed_size,
    dict_compressed_size,
    make_backend,
    ncd,
    ncd_value,
    ref_compress_size,
    ref_entropy_coded_size,
    ref_longest_match,
    reference_tokens,
    train_dictionary,
)

ALL_BACKENDS = [ZstdBackend(), DeflateBackend(), ReferenceLzBackend()]
REAL_BACKENDS = [ZstdBackend(), DeflateBackend()]


def motif_bytes(seed: int, words: int = 25, tokens: int = 400) -> bytes:
    rng = random.Random(seed)
    vocab = ["".join(rng.choice("abcdefghij") for _ in range(rng.randint(4, 8))) for _ in range(words)]
    return (" ".join(rng.choice(vocab) for _ in range(tokens))).encode()


def random_bytes(seed: int, n: int) -> bytes:
    rng = random.Random(seed)
    return bytes(rng.randrange(256) for _ in range(n))


# --- compressed_size ---------------------------------------------------------

def test_redundant_input_collapses():
    # observed: zstd 19, deflate 34 (pin with +-10%)
    data = b"a" * 10_000
    assert compressed_size(ZstdBackend(), data) < 200
    assert compressed_size(DeflateBackend(), data) < 200
    assert 17 <= compressed_size(ZstdBackend(), data) <= 21
    assert 30 <= compressed_size(DeflateBackend(), data) <= 38


def test_incompressible_input_does_not_shrink():
    data = random_bytes(42, 1000)
    size = compressed_size(DeflateBackend(), data)
    assert size >= 1000
    assert size == 1011  # pinned observed value (zlib container overhead)


@pytest.mark.parametrize("backend", ALL_BACKENDS, ids=lambda b: b.kind)
def test_deterministic(backend):
    data = motif_bytes(1, tokens=120)
    assert backend.compressed_size(data) == backend.compressed_size(data)


@pytest.mark.parametrize("backend", ALL_BACKENDS, ids=lambda b: b.kind)
def test_empty_input_rejected(backend):
    with pytest.raises(ValueError):
        backend.compressed_size(b"")


@settings(max_examples=40, deadline=None)
@given(st.binary(min_size=1, max_size=400))
def test_size_positive_property(data):
    for backend in ALL_BACKENDS:
        assert backend.compressed_size(data) >= 1


def test_make_backend_factory():
    assert make_backend("zstd", 5).level == 5
    assert make_backend("deflate").level == 6
    assert make_backend("reference-lz").kind == "reference-lz"
    with pytest.raises(ValueError):
        make_backend("lzma")


def test_adaptive_level_rule():
    backend = ZstdBackend(level=3, adaptive_level=True)
    assert backend.effective_level(1000) == 3
    assert backend.effective_level(64 * 1024) == 1
    assert ZstdBackend(level=3, adaptive_level=False).effective_level(1 << 20) == 3


# --- zstd / deflate interoperability ----------------------------------------

def test_zstd_frame_round_trip():
    data = motif_bytes(3)
    frame = ZstdBackend().compress(data)
    assert zb.decompress(frame) == data
    assert len(frame) == ZstdBackend().compressed_size(data)


def test_deflate_container_round_trip():
    data = motif_bytes(4)
    payload = DeflateBackend().compress(data)
    assert zlib.decompress(payload) == data


def test_zstd_dict_frame_round_trip():
    seg = motif_bytes(5, tokens=2000)
    dictionary = train_dictionary(ZstdBackend(), seg, SourceSpan("c", 0, 0, len(seg)))
    comp = DictCompressor(ZstdBackend(), dictionary)
    data = motif_bytes(5, tokens=150)
    frame = comp.compress(data)
    assert zb.decompress(frame, dictionary.payload) == data


# --- dictionary training -----------------------------------------------------

def test_train_dictionary_benefit():
    seg = b"abcabcabc" * 100
    dictionary = train_dictionary(ZstdBackend(), seg, SourceSpan("c", 0, 0, len(seg)))
    assert dictionary.payload
    comp = DictCompressor(ZstdBackend(), dictionary)
    query = b"abcabc" * 40
    assert comp.score(query) < compressed_size(ZstdBackend(), query)


def test_train_dictionary_empty_segment():
    with pytest.raises(ValueError):
        train_dictionary(ZstdBackend(), b"", SourceSpan("c", 0, 0, 1))


def test_train_dictionary_deflate_unsupported():
    with pytest.raises(UnsupportedBackendError):
        train_dictionary(DeflateBackend(), b"abc" * 100, SourceSpan("c", 0, 0, 300))


def test_train_dictionary_small_segment_falls_back_to_raw():
    seg = b"xyz" * 20
    dictionary = train_dictionary(ZstdBackend(), seg, SourceSpan("c", 0, 0, len(seg)))
    assert dictionary.source_span.mode == "raw"
    assert dictionary.payload == seg


def test_train_dictionary_large_segment_trains():
    seg = motif_bytes(6, tokens=12000)[:65536]
    dictionary = train_dictionary(ZstdBackend(), seg, SourceSpan("c", 0, 0, len(seg)))
    assert dictionary.source_span.mode == "trained"
    assert 0 < len(dictionary.payload) < len(seg)


def test_train_dictionary_raw_mode_requested():
    seg = motif_bytes(6, tokens=12000)[:65536]
    dictionary = train_dictionary(ZstdBackend(), seg, SourceSpan("c", 0, 0, len(seg)), mode="raw")
    assert dictionary.source_span.mode == "raw"
    assert dictionary.payload == seg


# --- dict_compressed_size ----------------------------------------------------

@pytest.mark.parametrize("mode", ["trained", "raw"])
def test_dict_size_smaller_on_source_segment(mode):
    seg = motif_bytes(8, tokens=2000)
    dictionary = train_dictionary(ZstdBackend(), seg, SourceSpan("c", 0, 0, len(seg)), mode=mode)
    comp = DictCompressor(ZstdBackend(), dictionary)
    assert dict_compressed_size(comp, seg) < compressed_size(ZstdBackend(), seg)


def _disjoint_alphabet_pair():
    rng = random.Random(9)
    vocab_a = ["".join(rng.choice("abcdefghij") for _ in range(6)) for _ in range(25)]
    vocab_b = ["".join(rng.choice("KLMNOPQRST") for _ in range(6)) for _ in range(25)]
    seg = (" ".join(rng.choice(vocab_a) for _ in range(2000))).encode()
    query = (" ".join(rng.choice(vocab_b) for _ in range(300))).encode()
    return seg, query


def test_dict_size_disjoint_alphabet_near_plain_raw_mode():
    seg, query = _disjoint_alphabet_pair()
    plain = compressed_size(ZstdBackend(), query)
    dictionary = train_dictionary(ZstdBackend(), seg, SourceSpan("c", 0, 0, len(seg)), mode="raw")
    size = dict_compressed_size(DictCompressor(ZstdBackend(), dictionary), query)
    assert abs(size - (plain + dictionary.overhead_bytes)) <= 0.05 * plain


def test_dict_size_disjoint_alphabet_inflates_trained_mode():
    # ZDICT dictionaries carry entropy tables fitted to their source alphabet;
    # compress_usingCDict applies them unconditionally, so alien content costs
    # MORE than plain compression. That asymmetry widens class separation and
    # is pinned here rather than hidden (observed +24%).
    seg, query = _disjoint_alphabet_pair()
    plain = compressed_size(ZstdBackend(), query)
    dictionary = train_dictionary(ZstdBackend(), seg, SourceSpan("c", 0, 0, len(seg)), mode="trained")
    assert dictionary.source_span.mode == "trained"
    size = dict_compressed_size(DictCompressor(ZstdBackend(), dictionary), query)
    assert plain <= size <= 1.4 * plain


def test_dict_size_deterministic():
    seg = motif_bytes(10, tokens=1500)
    comp = DictCompressor(
        ZstdBackend(), train_dictionary(ZstdBackend(), seg, SourceSpan("c", 0, 0, len(seg)))
    )
    q = motif_bytes(10, tokens=100)
    assert dict_compressed_size(comp, q) == dict_compressed_size(comp, q)


def test_dictionary_benefit_property():
    # same-generator inputs >= 256 bytes compress better with the dictionary
    for seed in range(8):
        seg = motif_bytes(100 + seed, tokens=3000)
        comp = DictCompressor(
            ZstdBackend(), train_dictionary(ZstdBackend(), seg, SourceSpan("c", 0, 0, len(seg)))
        )
        query = motif_bytes(100 + seed, tokens=60)
        assert len(query) >= 256
        assert dict_compressed_size(comp, query) < compressed_size(ZstdBackend(), query)


def test_reference_backend_dictionary():
    backend = ReferenceLzBackend()
    seg = b"needle in the haystack, " * 40
    dictionary = train_dictionary(backend, seg, SourceSpan("c", 0, 0, len(seg)))
    comp = DictCompressor(backend, dictionary)
    assert dict_compressed_size(comp, seg) < backend.compressed_size(seg)
    assert dict_compressed_size(comp, seg) >= 1


# --- ref_longest_match -------------------------------------------------------

def test_longest_match_self_referential_run():
    assert ref_longest_match(b"", b"aaaa", 1) == (3, 1)


def test_longest_match_full_window():
    assert ref_longest_match(b"hello", b"hello", 0) == (5, 5)


def test_longest_match_distinct_bytes():
    data = bytes(range(32))
    for pos in (0, 5, 31):
        assert ref_longest_match(b"", data, pos) == (0, 0)


def test_longest_match_prefers_nearest_on_tie():
    # "abc" occurs twice in the window; nearest start wins
    assert ref_longest_match(b"abcXabcY", b"abcZ", 0) == (3, 4)


def test_longest_match_position_bounds():
    with pytest.raises(ValueError):
        ref_longest_match(b"", b"abc", 3)


def brute_longest_match(window: bytes, text: bytes, position: int):
    """Independent O(n^2) oracle: scan every start, extend byte by byte."""
    buf = window + text
    pos = len(window) + position
    best_len, best_off = 0, 0
    for start in range(pos):
        length = 0
        while pos + length < len(buf) and buf[start + length] == buf[pos + length]:
            length += 1
        # ties prefer the smallest offset: >= on later (nearer) starts
        if length >= 3 and length >= best_len:
            best_len, best_off = length, pos - start
    return (best_len, best_off) if best_len >= 3 else (0, 0)


def test_longest_match_against_brute_force_spot():
    rng = random.Random(11)
    for _ in range(60):
        alphabet = rng.choice([2, 4, 8])
        n = rng.randint(4, 200)
        text = bytes(rng.randrange(alphabet) for _ in range(n))
        window = bytes(rng.randrange(alphabet) for _ in range(rng.randint(0, 40)))
        pos = rng.randrange(n)
        assert ref_longest_match(window, text, pos) == brute_longest_match(window, text, pos)


# --- ref_entropy_coded_size --------------------------------------------------

def test_entropy_uniform_four_symbols():
    assert ref_entropy_coded_size(["a", "b", "c", "d"]) == pytest.approx(8.0)


def test_entropy_single_symbol():
    assert ref_entropy_coded_size(["x"] * 50) == pytest.approx(0.0)


def test_entropy_three_one_split():
    assert ref_entropy_coded_size(["a", "a", "a", "b"]) == pytest.approx(3.2451124978, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=9), min_size=1, max_size=200))
def test_entropy_matches_closed_form(tokens):
    from collections import Counter

    counts = Counter(tokens)
    total = len(tokens)
    expected = -sum(c * math.log2(c / total) for c in counts.values())
    got = ref_entropy_coded_size(tokens)
    assert got == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_entropy_empty_rejected():
    with pytest.raises(ValueError):
        ref_entropy_coded_size([])


# --- ref_compress_size -------------------------------------------------------

def test_ref_dictionary_strictly_helps():
    data = b"the quick brown fox jumps over the lazy dog. " * 20
    with_dict = ref_compress_size(data, data)
    without = ref_compress_size(b"", data)
    assert with_dict < without


def test_ref_all_distinct_literals_closed_form():
    for n in (2, 17, 100, 200):
        data = bytes(range(n))
        assert ref_compress_size(b"", data) == math.ceil(n * math.log2(n) / 8)


def test_ref_window_one_never_beats_full_window():
    for seed in range(6):
        data = (motif_bytes(seed, words=6, tokens=80))[:512]
        assert ref_compress_size(b"", data, 1) >= ref_compress_size(b"", data, len(data))


def test_ref_monotone_on_seeded_families():
    """Appending bytes does not decrease the size on random and motif data.

    This is a family-scoped property: adversarial inputs exist where
    completing a truncated final match merges a rare token into a frequent
    one and saves more than a byte (see the regression below).
    """
    rng = random.Random(13)
    for seed in range(10):
        base = motif_bytes(seed, words=8, tokens=60) if seed % 2 else random_bytes(seed, 300)
        suffix = motif_bytes(seed + 50, words=8, tokens=10) if seed % 2 else random_bytes(seed + 50, 40)
        cut = rng.randint(1, len(suffix))
        small = ref_compress_size(b"", base)
        grown = ref_compress_size(b"", base + suffix[:cut])
        assert grown >= small


def test_ref_monotonicity_has_adversarial_exception():
    # Documented limitation of per-message empirical-entropy accounting:
    # the final truncated "xyz" token merges into the frequent "xyzw" token.
    data = b"xyzw"
    for i in range(120):
        data += bytes([128 + i]) + b"xyzw"
    data += b"\x7f" + b"xyz"
    assert ref_compress_size(b"", data + b"w") < ref_compress_size(b"", data)


def test_ref_tokens_greedy_parse():
    toks = reference_tokens(b"", b"ababab", 64)
    # literals a, b then one overlapping match covering "abab"
    assert toks == [b"a", b"b", b"abab"]


def test_ref_compress_rejects_bad_args():
    with pytest.raises(ValueError):
        ref_compress_size(b"", b"")
    with pytest.raises(ValueError):
        ref_compress_size(b"", b"abc", 0)


# --- ncd ----------------------------------------------------------------------

def test_ncd_identical_inputs_small():
    x = motif_bytes(20, tokens=800)  # ~5 KB of patterned text
    assert len(x) >= 4500
    value = ncd(DeflateBackend(), x, x)
    assert 0.0 <= value <= 0.15
    assert value == pytest.approx(0.0562, abs=0.02)  # pinned observed


def test_ncd_independent_random():
    x = random_bytes(21, 2000)
    y = random_bytes(22, 2000)
    value = ncd(DeflateBackend(), x, y)
    assert 0.85 <= value <= 1.1
    assert value == pytest.approx(1.0005, abs=0.02)  # pinned observed


def test_ncd_near_symmetry_sampled():
    for seed in range(5):
        x = motif_bytes(30 + seed, tokens=300)
        y = motif_bytes(40 + seed, tokens=300)
        assert abs(ncd(DeflateBackend(), x, y) - ncd(DeflateBackend(), y, x)) <= 0.05


def test_ncd_stubbed_sizes_exact():
    class Stub:
        kind = "stub"

        def __init__(self, sizes):
            self.sizes = sizes

        def compressed_size(self, data):
            return self.sizes[data]

    stub = Stub({b"x": 100, b"y": 80, b"xy": 130})
    assert ncd(stub, b"x", b"y") == (130 - 80) / 100
    stub2 = Stub({b"x": 50, b"y": 200, b"xy": 205})
    assert ncd(stub2, b"x", b"y") == (205 - 50) / 200
    assert ncd_value(12, 10, 10) == pytest.approx(0.2)


def test_ncd_rejects_empty():
    with pytest.raises(ValueError):
        ncd(DeflateBackend(), b"", b"x")
    with pytest.raises(ValueError):
        ncd(DeflateBackend(), b"x", b"")


@settings(max_examples=30, deadline=None)
@given(st.binary(min_size=1, max_size=600), st.binary(min_size=1, max_size=600))
def test_ncd_bounded_property(x, y):
    for backend in REAL_BACKENDS:
        assert -0.05 <= ncd(backend, x, y) <= 1.15
