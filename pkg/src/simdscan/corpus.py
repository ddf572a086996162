"""Corpus loading, synthetic document generation and match statistics.

Synthetic documents are reproducible byte-for-byte from (charset, params).
Generation uses SplitMix64 in counter form: draw ``i`` (0-based) is
``mix(seed + (i + 1) * 0x9E3779B97F4A7C15)`` with the standard SplitMix64
finalizer.  A draw ``x`` is reduced to ``[0, m)`` as ``((x >> 32) * m) >> 32``.
With ``k = floor(density * length + 0.5)`` matches:

* draws ``0 .. k-1`` pick match positions by a partial Fisher-Yates
  shuffle of ``0 .. length-1`` (step ``i`` swaps slot ``i`` with slot
  ``i + reduce(draw_i, length - i)``); the first ``k`` slots are the positions;
* draws ``k .. 2k-1`` pick the member byte for each position, in order;
* draws ``2k .. 2k+length-1`` pick a filler byte for every offset of the
  document; member positions then overwrite their filler byte.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .charset import CharSet
from .kernels import as_bytes_array, compiled

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


class DensityOutOfRange(ValueError):
    pass


def splitmix64(seed: int, start: int, count: int) -> np.ndarray:
    """Draws ``start .. start+count-1`` of the SplitMix64 sequence for ``seed``."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * GAMMA
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def reduce_range(draws: np.ndarray, bound) -> np.ndarray:
    return ((draws >> np.uint64(32)) * np.asarray(bound, dtype=np.uint64)) >> np.uint64(32)


def default_filler(charset: CharSet) -> bytes:
    return bytes(b for b in range(0x20, 0x7F) if b not in charset.members)


@dataclass(frozen=True)
class SynthParams:
    length: int
    target_density: float
    seed: int = 0
    filler_alphabet: bytes | None = None

    @property
    def match_count(self) -> int:
        return math.floor(self.target_density * self.length + 0.5)

    def describe(self) -> str:
        return f"synth(length={self.length},density={self.target_density},seed={self.seed})"


@dataclass
class CorpusDoc:
    name: str
    data: bytes
    source: str | SynthParams = field(default="")

    def __len__(self) -> int:
        return len(self.data)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.data)


def load_corpus(path) -> CorpusDoc:
    with open(path, "rb") as fh:
        data = fh.read()
    return CorpusDoc(os.path.basename(os.fspath(path)), data, os.fspath(path))


def generate_synthetic(charset: CharSet, params: SynthParams) -> CorpusDoc:
    n = params.length
    if n < 0:
        raise ValueError("length must be non-negative")
    if not 0.0 <= params.target_density <= 1.0 or math.isnan(params.target_density):
        raise DensityOutOfRange(f"density {params.target_density} outside [0, 1]")
    filler = params.filler_alphabet if params.filler_alphabet is not None else default_filler(charset)
    clash = sorted(set(filler) & set(charset.members))
    if clash:
        raise ValueError(f"filler alphabet contains set members: {[hex(c) for c in clash]}")
    k = params.match_count
    if k < n and not filler:
        raise ValueError("filler alphabet is empty")

    draws = splitmix64(params.seed, 0, 2 * k + n)
    steps = reduce_range(draws[:k], np.arange(n, n - k, -1, dtype=np.uint64)).tolist()
    swapped: dict[int, int] = {}
    positions = []
    for i, step in enumerate(steps):
        j = i + int(step)
        positions.append(swapped.get(j, j))
        swapped[j] = swapped.get(i, i)

    members = np.frombuffer(bytes(charset.members), np.uint8)
    out = np.frombuffer(filler, np.uint8)[reduce_range(draws[2 * k:], len(filler))] if n > k else np.zeros(n, np.uint8)
    out = np.array(out, dtype=np.uint8)
    if k:
        out[np.array(positions, dtype=np.int64)] = members[reduce_range(draws[k:2 * k], len(members))]
    return CorpusDoc(params.describe(), out.tobytes(), params)


def parse_synth_spec(spec: str) -> SynthParams:
    """``length=<N>,density=<float>,seed=<u64>``; seed defaults to 0."""
    fields: dict[str, str] = {}
    for part in spec.split(","):
        key, sep, value = part.partition("=")
        key = key.strip().lower()
        if not sep or key not in ("length", "density", "seed") or key in fields:
            raise ValueError(f"bad synthetic spec {spec!r}: expected length=<N>,density=<float>,seed=<u64>")
        fields[key] = value.strip()
    if "length" not in fields or "density" not in fields:
        raise ValueError(f"synthetic spec {spec!r} needs both length and density")
    seed = int(fields.get("seed", "0"), 0)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in 64 unsigned bits")
    return SynthParams(int(fields["length"]), float(fields["density"]), seed)


@dataclass(frozen=True)
class CorpusStats:
    name: str
    bytes: int
    matches: int

    @property
    def ratio(self) -> float:
        return self.matches / self.bytes if self.bytes else 0.0

    def as_dict(self) -> dict:
        return {"file": self.name, "bytes": self.bytes, "matches": self.matches, "ratio": self.ratio}


def corpus_stats(charset: CharSet, doc: CorpusDoc) -> CorpusStats:
    """Bytes, matches and density, always counted with the scalar kernel."""
    _, matches = compiled.fold_scalar(charset.table, as_bytes_array(doc.data))
    return CorpusStats(doc.name, len(doc.data), int(matches))
