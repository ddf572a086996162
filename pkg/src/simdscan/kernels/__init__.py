"""The four scanning kernels and their single-block building blocks.

Backends:

``reference``
    numpy, one function per vector instruction; single-block operations only.
``emulated``
    compiled scalar emulation of every lane; available wherever numba runs.
``vector``
    compiled with real 128-bit vector instructions (x86-64 SSSE3 or aarch64).
``vector-addp``
    as ``vector``, but index64 always aggregates with bit weights and three
    rounds of pairwise adds, even on x86 where ``vector`` uses pmovmskb.

``default_backend()`` picks ``vector`` when the host supports it and it
passes a start-up cross-check against ``emulated``; set
``SIMDSCAN_BACKEND=emulated`` to force the portable path.
"""

from __future__ import annotations

import enum
import logging
import os
from functools import lru_cache

import numpy as np

from ..charset import CharSet
from . import _vector, compiled, reference

log = logging.getLogger(__name__)

BACKENDS = ("emulated", "vector", "vector-addp")


class KernelId(str, enum.Enum):
    SCALAR = "scalar"
    WEBKIT16 = "webkit16"
    BLINK16 = "blink16"
    INDEX64 = "index64"

    @classmethod
    def parse(cls, name) -> "KernelId":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise UnknownKernel(name) from None


class UnknownKernel(ValueError):
    def __init__(self, name):
        choices = ", ".join(k.value for k in KernelId)
        super().__init__(f"unknown kernel {name!r}; valid choices: {choices}")


def as_bytes_array(data) -> np.ndarray:
    """A zero-copy uint8 view of ``data`` (bytes, bytearray, memoryview or ndarray)."""
    if isinstance(data, np.ndarray):
        if data.dtype != np.uint8 or data.ndim != 1:
            raise TypeError("expected a 1-d uint8 array")
        return np.ascontiguousarray(data)
    return np.frombuffer(data, dtype=np.uint8)


@lru_cache(maxsize=None)
def get_backend(name: str) -> compiled.Backend:
    if name == "emulated":
        return compiled.make_emulated()
    if name == "vector":
        return compiled.make_vector()
    if name == "vector-addp":
        return compiled.make_vector(pairwise=True)
    raise ValueError(f"unknown backend {name!r}; valid choices: {', '.join(BACKENDS)}")


def _self_check(vec: compiled.Backend, emu: compiled.Backend) -> bool:
    rng = np.random.default_rng(0x5EED)
    table = np.frombuffer(bytes([0x00, 0x71, 0x22, 0xF3, 0x14, 0x55, 0x26, 0x07,
                                 0x98, 0x39, 0x1A, 0x0B, 0x3C, 0x0D, 0xEE, 0x6F]), np.uint8)
    data = rng.integers(0, 256, 4096 + 37, dtype=np.uint8)
    expected = emu.collect_scalar(table, data)
    return (np.array_equal(vec.collect_index64(table, data), expected)
            and np.array_equal(vec.collect_block16(table, data, False), expected)
            and np.array_equal(vec.collect_block16(table, data, True), expected))


@lru_cache(maxsize=None)
def default_backend() -> compiled.Backend:
    forced = os.environ.get("SIMDSCAN_BACKEND")
    if forced:
        return get_backend(forced)
    return get_backend("vector" if vector_available() else "emulated")


@lru_cache(maxsize=None)
def vector_available() -> bool:
    if _vector.TARGET is None:
        return False
    try:
        emu = get_backend("emulated")
        ok = _self_check(get_backend("vector"), emu) and _self_check(get_backend("vector-addp"), emu)
    except Exception as exc:  # numba lowering errors surface as many types
        log.warning("vector backend failed to compile, using emulation: %s", exc)
        return False
    if not ok:
        log.warning("vector backend disagrees with emulation, using emulation")
    return ok


def resolve_backend(backend=None) -> compiled.Backend:
    if backend is None:
        return default_backend()
    if isinstance(backend, compiled.Backend):
        return backend
    return get_backend(backend)


def _check_start(data: np.ndarray, start: int) -> None:
    if not 0 <= start <= data.shape[0]:
        raise ValueError(f"start position {start} outside 0..{data.shape[0]}")


def classify16(charset: CharSet, block, backend=None) -> np.ndarray:
    """Lanes of 0xFF (member) / 0x00 (non-member) for a 16-byte block."""
    if backend == "reference":
        return reference.classify(charset.table, block)
    arr = as_bytes_array(block)
    if arr.shape != (16,):
        raise ValueError(f"expected a block of exactly 16 bytes, got {arr.shape[0]}")
    out = np.empty(16, np.uint8)
    resolve_backend(backend).classify(arr, 0, charset.table, out)
    return out


def first_index_webkit(lanes, backend=None) -> int | None:
    """First matching lane via max-across, then min-across of (index OR NOT lanes)."""
    if backend == "reference":
        return reference.first_index_webkit(lanes)
    lanes = reference.check_lanes(lanes).copy()
    first = resolve_backend(backend).webkit_first(lanes)
    return None if first == 16 else int(first)


def narrowed_mask(lanes, backend=None) -> int:
    """The 64-bit shift-right-narrow summary: four bits per lane."""
    if backend == "reference":
        return reference.narrowed_mask(lanes)
    lanes = reference.check_lanes(lanes).copy()
    return int(resolve_backend(backend).blink_narrow(lanes))


def first_index_blink(lanes, backend=None) -> int | None:
    mask = narrowed_mask(lanes, backend)
    if mask == 0:
        return None
    return reference.trailing_zeros(mask) >> 2


def build_index64(charset: CharSet, block, backend=None) -> int:
    """MatchMask64 of a 64-byte block: bit i set iff byte i is a member."""
    if backend == "reference":
        return reference.build_index64(charset.table, block)
    arr = as_bytes_array(block)
    if arr.shape != (64,):
        raise ValueError(f"expected a block of exactly 64 bytes, got {arr.shape[0]}")
    return int(resolve_backend(backend).index64_block(arr, 0, charset.table))


def scan_scalar(charset: CharSet, data, start: int = 0) -> int | None:
    arr = as_bytes_array(data)
    _check_start(arr, start)
    p = compiled.scan_scalar(charset.table, arr, start)
    return None if p < 0 else int(p)


def scan_block16(charset: CharSet, data, start: int = 0, variant=KernelId.WEBKIT16, backend=None) -> int | None:
    variant = KernelId.parse(variant)
    arr = as_bytes_array(data)
    _check_start(arr, start)
    be = resolve_backend(backend)
    if variant is KernelId.WEBKIT16:
        p = be.scan_webkit16(charset.table, arr, start)
    elif variant is KernelId.BLINK16:
        p = be.scan_blink16(charset.table, arr, start)
    else:
        raise ValueError(f"scan_block16 variant must be webkit16 or blink16, not {variant.value}")
    return None if p < 0 else int(p)


__all__ = [
    "KernelId", "UnknownKernel", "as_bytes_array", "build_index64", "classify16",
    "default_backend", "first_index_blink", "first_index_webkit", "get_backend",
    "narrowed_mask", "resolve_backend", "scan_block16", "scan_scalar", "vector_available",
]
