"""Compiled scan loops, one set per backend.

``emulated`` computes each lane with scalar code and runs anywhere numba
does.  ``vector`` swaps in the LLVM vector primitives from ``_vector``.
Both are generated from the same loop bodies by ``_build_backend``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from . import _vector
from ._vector import cttz64

FOLD_SEED = np.uint64(0xCBF29CE484222325)
FOLD_PRIME = np.uint64(0x100000001B3)
NO_MATCH = -1


@njit(cache=True)
def fold_position(h, p):
    return (h ^ np.uint64(p)) * FOLD_PRIME


@njit(cache=True)
def _lane(data, i, table):
    b = data[i]
    return np.uint8(0xFF) if table[b & 0x0F] == b else np.uint8(0)


@njit(cache=True)
def e_classify(data, offset, table, out):
    for j in range(16):
        out[j] = _lane(data, offset + j, table)


@njit(cache=True)
def e_webkit_first(lanes):
    mx = 0
    for j in range(16):
        mx = max(mx, lanes[j])
    if mx == 0:
        return 16
    mn = 0xFF
    for j in range(16):
        mn = min(mn, (j | ~lanes[j]) & 0xFF)
    return mn


@njit(cache=True)
def e_blink_narrow(lanes):
    mask = np.uint64(0)
    for w in range(8):
        word = np.uint64(lanes[2 * w]) | (np.uint64(lanes[2 * w + 1]) << np.uint64(8))
        mask |= ((word >> np.uint64(4)) & np.uint64(0xFF)) << np.uint64(8 * w)
    return mask


@njit(cache=True)
def e_webkit_block(data, offset, table):
    mx = 0
    for j in range(16):
        mx = max(mx, _lane(data, offset + j, table))
    if mx == 0:
        return 16
    mn = 0xFF
    for j in range(16):
        mn = min(mn, (j | ~_lane(data, offset + j, table)) & 0xFF)
    return mn


@njit(cache=True)
def e_blink_block(data, offset, table):
    mask = np.uint64(0)
    for w in range(8):
        lo = np.uint64(_lane(data, offset + 2 * w, table))
        hi = np.uint64(_lane(data, offset + 2 * w + 1, table))
        word = lo | (hi << np.uint64(8))
        mask |= ((word >> np.uint64(4)) & np.uint64(0xFF)) << np.uint64(8 * w)
    return mask


@njit(cache=True)
def e_index64_block(data, offset, table):
    # byte j of the result is the three-round pairwise sum of weighted lanes 8j..8j+7
    mask = np.uint64(0)
    for j in range(8):
        base = offset + 8 * j
        w0 = _lane(data, base, table) & 0x01
        w1 = _lane(data, base + 1, table) & 0x02
        w2 = _lane(data, base + 2, table) & 0x04
        w3 = _lane(data, base + 3, table) & 0x08
        w4 = _lane(data, base + 4, table) & 0x10
        w5 = _lane(data, base + 5, table) & 0x20
        w6 = _lane(data, base + 6, table) & 0x40
        w7 = _lane(data, base + 7, table) & 0x80
        byte = ((w0 + w1) + (w2 + w3)) + ((w4 + w5) + (w6 + w7))
        mask |= np.uint64(byte & 0xFF) << np.uint64(8 * j)
    return mask


@njit(cache=True)
def scan_scalar(table, data, start):
    for i in range(start, data.shape[0]):
        b = data[i]
        if table[b & 0x0F] == b:
            return i
    return NO_MATCH


@njit(cache=True)
def fold_scalar(table, data):
    h = FOLD_SEED
    count = 0
    p = scan_scalar(table, data, 0)
    while p >= 0:
        h = fold_position(h, p)
        count += 1
        p = scan_scalar(table, data, p + 1)
    return h, count


@njit(cache=True)
def collect_scalar(table, data):
    out = np.empty(data.shape[0], np.int64)
    count = 0
    p = scan_scalar(table, data, 0)
    while p >= 0:
        out[count] = p
        count += 1
        p = scan_scalar(table, data, p + 1)
    return out[:count].copy()


class Backend:
    """The compiled kernel set for one backend."""

    def __init__(self, name, classify, webkit_first, blink_narrow, webkit_block, blink_block, index64_block):
        self.name = name
        self.classify = classify
        self.webkit_first = webkit_first
        self.blink_narrow = blink_narrow

        @njit
        def index64_single(data, offset, table):
            return index64_block(data, offset, table)

        self.index64_block = index64_single
        self.scan_scalar = scan_scalar
        self.fold_scalar = fold_scalar
        self.collect_scalar = collect_scalar

        @njit
        def scan_webkit16(table, data, start):
            n = data.shape[0]
            i = start
            while i + 16 <= n:
                first = webkit_block(data, i, table)
                if first != 16:
                    return i + first
                i += 16
            return scan_scalar(table, data, i)

        @njit
        def scan_blink16(table, data, start):
            n = data.shape[0]
            i = start
            while i + 16 <= n:
                mask = blink_block(data, i, table)
                if mask != 0:
                    return i + (cttz64(mask) >> 2)
                i += 16
            return scan_scalar(table, data, i)

        @njit
        def fold_webkit16(table, data):
            h = FOLD_SEED
            count = 0
            p = scan_webkit16(table, data, 0)
            while p >= 0:
                h = fold_position(h, p)
                count += 1
                p = scan_webkit16(table, data, p + 1)
            return h, count

        @njit
        def fold_blink16(table, data):
            h = FOLD_SEED
            count = 0
            p = scan_blink16(table, data, 0)
            while p >= 0:
                h = fold_position(h, p)
                count += 1
                p = scan_blink16(table, data, p + 1)
            return h, count

        @njit
        def collect_block16(table, data, blink):
            out = np.empty(data.shape[0], np.int64)
            count = 0
            p = scan_blink16(table, data, 0) if blink else scan_webkit16(table, data, 0)
            while p >= 0:
                out[count] = p
                count += 1
                p = scan_blink16(table, data, p + 1) if blink else scan_webkit16(table, data, p + 1)
            return out[:count].copy()

        @njit
        def advance_index64(table, data, base):
            # returns (block base, mask, blocks loaded); mask == 0 means < 64 bytes remain at base
            n = data.shape[0]
            loads = 0
            while base + 64 <= n:
                mask = index64_block(data, base, table)
                loads += 1
                if mask != 0:
                    return base, mask, loads
                base += 64
            return base, np.uint64(0), loads

        @njit
        def fold_index64(table, data):
            n = data.shape[0]
            h = FOLD_SEED
            count = 0
            blocks = 0
            base = 0
            while base + 64 <= n:
                mask = index64_block(data, base, table)
                blocks += 1
                while mask != 0:
                    h = fold_position(h, base + cttz64(mask))
                    count += 1
                    mask &= mask - np.uint64(1)
                base += 64
            for i in range(base, n):
                b = data[i]
                if table[b & 0x0F] == b:
                    h = fold_position(h, i)
                    count += 1
            return h, count, blocks, n - base

        @njit
        def collect_index64(table, data):
            n = data.shape[0]
            out = np.empty(n, np.int64)
            count = 0
            base = 0
            while base + 64 <= n:
                mask = index64_block(data, base, table)
                while mask != 0:
                    out[count] = base + cttz64(mask)
                    count += 1
                    mask &= mask - np.uint64(1)
                base += 64
            for i in range(base, n):
                b = data[i]
                if table[b & 0x0F] == b:
                    out[count] = i
                    count += 1
            return out[:count].copy()

        self.scan_webkit16 = scan_webkit16
        self.scan_blink16 = scan_blink16
        self.fold_webkit16 = fold_webkit16
        self.fold_blink16 = fold_blink16
        self.collect_block16 = collect_block16
        self.advance_index64 = advance_index64
        self.fold_index64 = fold_index64
        self.collect_index64 = collect_index64

    def __repr__(self):
        return f"<Backend {self.name}>"


def make_emulated() -> Backend:
    return Backend("emulated", e_classify, e_webkit_first, e_blink_narrow,
                   e_webkit_block, e_blink_block, e_index64_block)


def make_vector(pairwise: bool | None = None) -> Backend:
    """Vector backend.

    index64 collapses its four classified registers into a 64-bit mask with
    bit weights and three rounds of pairwise adds (``pairwise=True``, the
    only option on aarch64) or, on x86, with the native pmovmskb.  Both give
    identical bits; the default is the cheaper one for the target.
    """
    if _vector.TARGET is None:
        raise RuntimeError("no 128-bit vector target on this host")
    if pairwise is None:
        pairwise = _vector.TARGET != "x86"
    if not pairwise and _vector.TARGET != "x86":
        raise RuntimeError("native movemask is only available on x86-64")
    index64 = _vector.v_index64_block if pairwise else _vector.v_index64_block_movemask
    name = "vector-addp" if pairwise and _vector.TARGET == "x86" else "vector"
    return Backend(name, _v_classify, _v_webkit_first, _v_blink_narrow,
                   _vector.v_webkit_block, _vector.v_blink_block, index64)


# python-callable wrappers; the intrinsics themselves only work inside compiled code
@njit(cache=True)
def _v_classify(data, offset, table, out):
    _vector.v_classify(data, offset, table, out)


@njit(cache=True)
def _v_webkit_first(lanes):
    return _vector.v_webkit_first(lanes)


@njit(cache=True)
def _v_blink_narrow(lanes):
    return _vector.v_blink_narrow(lanes)
