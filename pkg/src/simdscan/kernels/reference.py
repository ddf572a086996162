"""Lane-by-lane numpy emulation of the 128-bit vector operations.

Every function here mirrors one vector instruction (or a short fixed
sequence) on uint8 arrays.  Nothing is fused or shortcut, so these are the
reference the compiled backends are checked against.
"""

from __future__ import annotations

import numpy as np

LANE_INDEX = np.arange(16, dtype=np.uint8)
BIT_WEIGHTS = np.array([0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80] * 2, dtype=np.uint8)


def _as_block(block, size: int) -> np.ndarray:
    arr = np.frombuffer(block, dtype=np.uint8) if isinstance(block, (bytes, bytearray, memoryview)) else np.asarray(block, dtype=np.uint8)
    if arr.shape != (size,):
        raise ValueError(f"expected a block of exactly {size} bytes, got shape {arr.shape}")
    return arr


def table_lookup(table: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """tbl: out-of-range indices yield 0."""
    out = np.zeros_like(indices)
    ok = indices < 16
    out[ok] = table[indices[ok]]
    return out


def compare_eq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.where(a == b, np.uint8(0xFF), np.uint8(0))


def classify(table: np.ndarray, block) -> np.ndarray:
    block = _as_block(block, 16)
    low = block & np.uint8(0x0F)
    return compare_eq(table_lookup(table, low), block)


def max_across(v: np.ndarray) -> int:
    return int(v.max())


def min_across(v: np.ndarray) -> int:
    return int(v.min())


def or_not(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a | ~b


def check_lanes(lanes) -> np.ndarray:
    lanes = _as_block(lanes, 16)
    if not np.all((lanes == 0) | (lanes == 0xFF)):
        raise ValueError("classified lanes must each be 0x00 or 0xFF")
    return lanes


def first_index_webkit(lanes) -> int | None:
    lanes = check_lanes(lanes)
    if max_across(lanes) == 0:
        return None
    return min_across(or_not(LANE_INDEX, lanes))


def shift_right_narrow(lanes: np.ndarray, shift: int) -> np.ndarray:
    """shrn on 16-bit words: eight little-endian words in, eight bytes out."""
    words = lanes.view("<u2")
    return ((words >> shift) & 0xFF).astype(np.uint8)


def narrowed_mask(lanes) -> int:
    lanes = check_lanes(lanes)
    return int(shift_right_narrow(lanes, 4).view("<u8")[0])


def trailing_zeros(x: int) -> int:
    return (x & -x).bit_length() - 1


def first_index_blink(lanes) -> int | None:
    mask = narrowed_mask(lanes)
    if mask == 0:
        return None
    return trailing_zeros(mask) >> 2


def pairwise_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """addp: adjacent-pair byte sums of ``a`` followed by those of ``b``, wrapping mod 256."""
    cat = np.concatenate([a, b]).astype(np.uint16)
    return ((cat[0::2] + cat[1::2]) & 0xFF).astype(np.uint8)


def build_index64(table: np.ndarray, block) -> int:
    block = _as_block(block, 64)
    weighted = [classify(table, block[16 * k : 16 * k + 16]) & BIT_WEIGHTS for k in range(4)]
    sum0 = pairwise_add(weighted[0], weighted[1])
    sum1 = pairwise_add(weighted[2], weighted[3])
    folded = pairwise_add(sum0, sum1)
    folded = pairwise_add(folded, folded)
    return int(folded.view("<u8")[0])
