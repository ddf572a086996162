"""Iterating over every match in a document."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charset import CharSet
from .kernels import KernelId, as_bytes_array, compiled, resolve_backend


@dataclass
class ScanCounters:
    """Instrumentation for the index64 path: 64-byte block loads and scalar tail bytes."""

    block_loads: int = 0
    tail_bytes: int = 0


class MatchStream:
    """Ascending match positions of ``charset`` in ``data``.

    The stream holds a view of ``data``, not a copy; the buffer must not be
    mutated while the stream is live.  Not safe to share between threads.
    """

    def __init__(self, charset: CharSet, data, kernel=KernelId.INDEX64, backend=None,
                 counters: ScanCounters | None = None):
        self.charset = charset
        self.data = as_bytes_array(data)
        self.kernel = KernelId.parse(kernel)
        self.counters = counters
        self._backend = resolve_backend(backend)
        self._table = charset.table
        self.cursor = 0
        self.pending_mask = 0
        self.mask_base = 0
        self._next_block = 0
        self._in_tail = False

    def __iter__(self):
        return self

    def __next__(self) -> int:
        p = self.next_match()
        if p is None:
            raise StopIteration
        return p

    def next_match(self) -> int | None:
        if self.kernel is KernelId.INDEX64:
            return self._next_index64()
        n = self.data.shape[0]
        if self.cursor > n:
            return None
        be = self._backend
        if self.kernel is KernelId.SCALAR:
            p = be.scan_scalar(self._table, self.data, self.cursor)
        elif self.kernel is KernelId.WEBKIT16:
            p = be.scan_webkit16(self._table, self.data, self.cursor)
        else:
            p = be.scan_blink16(self._table, self.data, self.cursor)
        if p < 0:
            self.cursor = n + 1
            return None
        self.cursor = int(p) + 1
        return int(p)

    def _next_index64(self) -> int | None:
        while True:
            if self.pending_mask:
                mask = self.pending_mask
                bit = (mask & -mask).bit_length() - 1
                self.pending_mask = mask & (mask - 1)
                self.cursor = self.mask_base + bit + 1
                return self.mask_base + bit
            if self._in_tail:
                return self._next_tail()
            base, mask, loads = self._backend.advance_index64(self._table, self.data, self._next_block)
            if self.counters is not None:
                self.counters.block_loads += int(loads)
            if mask:
                self.mask_base = int(base)
                self.pending_mask = int(mask)
                self._next_block = int(base) + 64
            else:
                self._in_tail = True
                self.cursor = int(base)
                if self.counters is not None:
                    self.counters.tail_bytes += self.data.shape[0] - int(base)

    def _next_tail(self) -> int | None:
        n = self.data.shape[0]
        if self.cursor >= n:
            return None
        p = compiled.scan_scalar(self._table, self.data, self.cursor)
        if p < 0:
            self.cursor = n
            return None
        self.cursor = int(p) + 1
        return int(p)


def open_stream(charset: CharSet, data, kernel=KernelId.INDEX64, backend=None,
                counters: ScanCounters | None = None) -> MatchStream:
    return MatchStream(charset, data, kernel, backend, counters)


def next_match(stream: MatchStream) -> int | None:
    return stream.next_match()


def all_matches(charset: CharSet, data, kernel=KernelId.INDEX64, backend=None) -> np.ndarray:
    """Every match position as an int64 array, traversed entirely in compiled code."""
    kernel = KernelId.parse(kernel)
    arr = as_bytes_array(data)
    be = resolve_backend(backend)
    table = charset.table
    if kernel is KernelId.SCALAR:
        return be.collect_scalar(table, arr)
    if kernel is KernelId.INDEX64:
        return be.collect_index64(table, arr)
    return be.collect_block16(table, arr, kernel is KernelId.BLINK16)


def fold_matches(charset: CharSet, data, kernel=KernelId.INDEX64, backend=None) -> tuple[int, int]:
    """(checksum, count) over every match position; the benchmark's unit of work."""
    kernel = KernelId.parse(kernel)
    arr = as_bytes_array(data)
    h, count = traversal(kernel, backend)(charset.table, arr)[:2]
    return int(h), int(count)


def traversal(kernel, backend=None):
    """The compiled whole-document fold for ``kernel``: (table, data) -> (checksum, count, ...)."""
    kernel = KernelId.parse(kernel)
    be = resolve_backend(backend)
    return {
        KernelId.SCALAR: be.fold_scalar,
        KernelId.WEBKIT16: be.fold_webkit16,
        KernelId.BLINK16: be.fold_blink16,
        KernelId.INDEX64: be.fold_index64,
    }[kernel]


def count_matches(charset: CharSet, data, kernel=KernelId.INDEX64, backend=None) -> tuple[int, float]:
    arr = as_bytes_array(data)
    _, count = fold_matches(charset, arr, kernel, backend)
    n = arr.shape[0]
    return count, (count / n if n else 0.0)
