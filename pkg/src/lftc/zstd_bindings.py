"""Minimal ctypes bindings for the system Zstandard library.

Only the pieces this package needs: one-shot compression, dictionary
training (ZDICT), digested-dictionary compression (CDict), and
decompression for round-trip checks.  Compression contexts are kept
thread-local because ZSTD_CCtx/ZSTD_DCtx are not thread-safe; CDict
handles are immutable and may be shared freely between threads.
"""

from __future__ import annotations

import ctypes
import ctypes.util
import threading
import weakref

_CONTENTSIZE_UNKNOWN = 2**64 - 1
_CONTENTSIZE_ERROR = 2**64 - 2

MIN_LEVEL = 1
MAX_LEVEL = 19  # ultra levels need explicit window handling; not used here


class ZstdError(RuntimeError):
    """A libzstd call returned an error code."""


_lib = None
_lib_lock = threading.Lock()


def _load():
    global _lib
    if _lib is not None:
        return _lib
    with _lib_lock:
        if _lib is not None:
            return _lib
        name = ctypes.util.find_library("zstd") or "libzstd.so.1"
        try:
            lib = ctypes.CDLL(name)
        except OSError as exc:  # pragma: no cover - environment dependent
            raise ZstdError(f"cannot load libzstd ({name}): {exc}") from exc

        c = ctypes
        lib.ZSTD_versionNumber.restype = c.c_uint
        lib.ZSTD_isError.restype = c.c_uint
        lib.ZSTD_isError.argtypes = [c.c_size_t]
        lib.ZSTD_getErrorName.restype = c.c_char_p
        lib.ZSTD_getErrorName.argtypes = [c.c_size_t]
        lib.ZSTD_compressBound.restype = c.c_size_t
        lib.ZSTD_compressBound.argtypes = [c.c_size_t]

        lib.ZSTD_createCCtx.restype = c.c_void_p
        lib.ZSTD_freeCCtx.restype = c.c_size_t
        lib.ZSTD_freeCCtx.argtypes = [c.c_void_p]
        lib.ZSTD_compressCCtx.restype = c.c_size_t
        lib.ZSTD_compressCCtx.argtypes = [
            c.c_void_p, c.c_void_p, c.c_size_t, c.c_void_p, c.c_size_t, c.c_int,
        ]

        lib.ZSTD_createCDict.restype = c.c_void_p
        lib.ZSTD_createCDict.argtypes = [c.c_void_p, c.c_size_t, c.c_int]
        lib.ZSTD_freeCDict.restype = c.c_size_t
        lib.ZSTD_freeCDict.argtypes = [c.c_void_p]
        lib.ZSTD_compress_usingCDict.restype = c.c_size_t
        lib.ZSTD_compress_usingCDict.argtypes = [
            c.c_void_p, c.c_void_p, c.c_size_t, c.c_void_p, c.c_size_t, c.c_void_p,
        ]

        lib.ZSTD_createDCtx.restype = c.c_void_p
        lib.ZSTD_freeDCtx.restype = c.c_size_t
        lib.ZSTD_freeDCtx.argtypes = [c.c_void_p]
        lib.ZSTD_decompress_usingDict.restype = c.c_size_t
        lib.ZSTD_decompress_usingDict.argtypes = [
            c.c_void_p, c.c_void_p, c.c_size_t, c.c_void_p, c.c_size_t, c.c_void_p, c.c_size_t,
        ]
        lib.ZSTD_getFrameContentSize.restype = c.c_ulonglong
        lib.ZSTD_getFrameContentSize.argtypes = [c.c_void_p, c.c_size_t]

        lib.ZDICT_trainFromBuffer.restype = c.c_size_t
        lib.ZDICT_trainFromBuffer.argtypes = [
            c.c_void_p, c.c_size_t, c.c_void_p, c.POINTER(c.c_size_t), c.c_uint,
        ]
        lib.ZDICT_isError.restype = c.c_uint
        lib.ZDICT_isError.argtypes = [c.c_size_t]
        lib.ZDICT_getErrorName.restype = c.c_char_p
        lib.ZDICT_getErrorName.argtypes = [c.c_size_t]

        _lib = lib
    return _lib


def _check(lib, code: int) -> int:
    if lib.ZSTD_isError(code):
        raise ZstdError(lib.ZSTD_getErrorName(code).decode("ascii", "replace"))
    return code


class _CCtxHolder:
    def __init__(self, lib):
        self.ptr = lib.ZSTD_createCCtx()
        if not self.ptr:
            raise ZstdError("ZSTD_createCCtx failed")
        self._finalizer = weakref.finalize(self, lib.ZSTD_freeCCtx, self.ptr)


_tls = threading.local()


def _cctx():
    holder = getattr(_tls, "cctx", None)
    if holder is None:
        holder = _CCtxHolder(_load())
        _tls.cctx = holder
    return holder.ptr


def version() -> tuple[int, int, int]:
    v = _load().ZSTD_versionNumber()
    return (v // 10000, (v // 100) % 100, v % 100)


def compress(data: bytes, level: int) -> bytes:
    """One-shot compression into a standard Zstandard frame."""
    lib = _load()
    bound = lib.ZSTD_compressBound(len(data))
    dst = ctypes.create_string_buffer(bound)
    n = _check(lib, lib.ZSTD_compressCCtx(_cctx(), dst, bound, data, len(data), level))
    return dst.raw[:n]


def compressed_size(data: bytes, level: int) -> int:
    lib = _load()
    bound = lib.ZSTD_compressBound(len(data))
    dst = ctypes.create_string_buffer(bound)
    return _check(lib, lib.ZSTD_compressCCtx(_cctx(), dst, bound, data, len(data), level))


class CDict:
    """A digested dictionary, shareable across threads.

    `payload` may be a ZDICT-trained dictionary or arbitrary raw content;
    libzstd distinguishes the two by the dictionary magic number.
    """

    def __init__(self, payload: bytes, level: int):
        lib = _load()
        self.level = level
        self._ptr = lib.ZSTD_createCDict(payload, len(payload), level)
        if not self._ptr:
            raise ZstdError("ZSTD_createCDict failed")
        self._finalizer = weakref.finalize(self, lib.ZSTD_freeCDict, self._ptr)


def compress_with_cdict(data: bytes, cdict: CDict) -> bytes:
    lib = _load()
    bound = lib.ZSTD_compressBound(len(data))
    dst = ctypes.create_string_buffer(bound)
    n = _check(
        lib,
        lib.ZSTD_compress_usingCDict(_cctx(), dst, bound, data, len(data), cdict._ptr),
    )
    return dst.raw[:n]


def compressed_size_with_cdict(data: bytes, cdict: CDict) -> int:
    lib = _load()
    bound = lib.ZSTD_compressBound(len(data))
    dst = ctypes.create_string_buffer(bound)
    return _check(
        lib,
        lib.ZSTD_compress_usingCDict(_cctx(), dst, bound, data, len(data), cdict._ptr),
    )


def train_dictionary(samples: list[bytes], capacity: int) -> bytes:
    """Run ZDICT over the sample set; raises ZstdError when it refuses
    (too little data, too few samples, ...)."""
    lib = _load()
    if not samples:
        raise ZstdError("no samples")
    blob = b"".join(samples)
    sizes = (ctypes.c_size_t * len(samples))(*[len(s) for s in samples])
    dst = ctypes.create_string_buffer(capacity)
    n = lib.ZDICT_trainFromBuffer(dst, capacity, blob, sizes, len(samples))
    if lib.ZDICT_isError(n):
        raise ZstdError(lib.ZDICT_getErrorName(n).decode("ascii", "replace"))
    return dst.raw[:n]


def decompress(frame: bytes, dict_payload: bytes = b"") -> bytes:
    """Round-trip helper; relies on the frame header carrying the content size."""
    lib = _load()
    size = lib.ZSTD_getFrameContentSize(frame, len(frame))
    if size in (_CONTENTSIZE_UNKNOWN, _CONTENTSIZE_ERROR):
        raise ZstdError("frame content size unavailable")
    dctx = lib.ZSTD_createDCtx()
    if not dctx:
        raise ZstdError("ZSTD_createDCtx failed")
    try:
        dst = ctypes.create_string_buffer(max(1, size))
        n = _check(
            lib,
            lib.ZSTD_decompress_usingDict(
                dctx, dst, size, frame, len(frame), dict_payload, len(dict_payload)
            ),
        )
        return dst.raw[:n]
    finally:
        lib.ZSTD_freeDCtx(dctx)
