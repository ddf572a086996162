"""Cross-checking every kernel against the scalar kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charset import CharSet
from .kernels import KernelId, as_bytes_array, resolve_backend
from .stream import all_matches


@dataclass
class KernelCheck:
    kernel: str
    ok: bool
    matches: int
    divergence: tuple[int, int | None, int | None] | None = None  # (match number, expected, got)

    def describe(self) -> str:
        if self.ok:
            return f"PASS {self.kernel} ({self.matches} matches)"
        k, expected, got = self.divergence
        exp = "end of stream" if expected is None else f"position {expected}"
        act = "end of stream" if got is None else f"position {got}"
        first = min(p for p in (expected, got) if p is not None)
        return f"FAIL {self.kernel}: first divergence at position {first} (match #{k}: expected {exp}, got {act})"


def first_divergence(expected: np.ndarray, got: np.ndarray):
    common = min(len(expected), len(got))
    diff = np.flatnonzero(expected[:common] != got[:common])
    if diff.size:
        k = int(diff[0])
        return k, int(expected[k]), int(got[k])
    if len(expected) == len(got):
        return None
    k = common
    return (k, int(expected[k]) if k < len(expected) else None, int(got[k]) if k < len(got) else None)


def verify_kernels(charset: CharSet, data, kernels=tuple(KernelId), backend=None) -> list[KernelCheck]:
    arr = as_bytes_array(data)
    be = resolve_backend(backend)
    oracle = all_matches(charset, arr, KernelId.SCALAR, be)
    checks = []
    for kernel in kernels:
        kernel = KernelId.parse(kernel)
        got = all_matches(charset, arr, kernel, be)
        where = first_divergence(oracle, got)
        checks.append(KernelCheck(kernel.value, where is None, len(got), where))
    return checks
