"""Throughput benchmark over full match traversals.

Each repetition walks every match of the corpus with one kernel and folds
the positions into a 64-bit checksum (the sink).  The checksum must agree
across kernels and repetitions, otherwise the run is aborted.
"""

from __future__ import annotations

import ctypes
import os
import statistics
import struct
import time
from dataclasses import asdict, dataclass, field

from .charset import CharSet
from .corpus import CorpusDoc
from .kernels import KernelId, as_bytes_array, resolve_backend
from .stream import traversal

CSV_COLUMNS = ("kernel", "corpus", "bytes", "matches", "reps", "elapsed_s", "gbps", "checksum")


class VerificationError(RuntimeError):
    pass


@dataclass
class BenchReport:
    kernel: str
    corpus: str
    bytes: int
    matches: int
    repetitions: int
    elapsed: float  # repetitions x median seconds per traversal
    throughput: float  # GB/s = bytes * repetitions / elapsed / 1e9
    checksum: int
    min_s: float
    median_s: float
    mean_s: float
    backend: str = ""
    total_bytes: int = 0
    counters: dict = field(default_factory=dict)

    def csv_row(self) -> list:
        return [self.kernel, self.corpus, self.bytes, self.matches, self.repetitions,
                f"{self.elapsed:.9f}", f"{self.throughput:.4f}", f"0x{self.checksum:016x}"]

    def as_dict(self) -> dict:
        out = asdict(self)
        out["checksum"] = f"0x{self.checksum:016x}"
        return out


def pin_cpu() -> int | None:
    """Pin this process to one CPU it may already run on; returns the CPU or None."""
    if not hasattr(os, "sched_setaffinity"):
        return None
    allowed = sorted(os.sched_getaffinity(0))
    if not allowed:
        return None
    os.sched_setaffinity(0, {allowed[0]})
    return allowed[0]


class HardwareCounters:
    """Instructions and cycles via Linux perf_event_open; ``available`` is False elsewhere."""

    _PERF_TYPE_HARDWARE = 0
    _CYCLES = 0
    _INSTRUCTIONS = 1
    _SYSCALL = {"x86_64": 298, "aarch64": 241}

    def __init__(self):
        self.fds: dict[str, int] = {}
        self.available = False
        nr = self._SYSCALL.get(os.uname().machine) if hasattr(os, "uname") else None
        if nr is None:
            return
        try:
            libc = ctypes.CDLL(None, use_errno=True)
        except OSError:
            return
        for name, config in (("cycles", self._CYCLES), ("instructions", self._INSTRUCTIONS)):
            # struct perf_event_attr (size 128): type, size, config, then flags with
            # exclude_kernel (bit 5) and exclude_hv (bit 6) set
            attr = bytearray(128)
            struct.pack_into("IIQ", attr, 0, self._PERF_TYPE_HARDWARE, 128, config)
            struct.pack_into("Q", attr, 40, (1 << 5) | (1 << 6))
            buf = ctypes.create_string_buffer(bytes(attr), 128)
            fd = libc.syscall(nr, buf, 0, -1, -1, 0)
            if fd < 0:
                self.close()
                return
            self.fds[name] = fd
        self.available = True

    def read(self) -> dict[str, int]:
        return {name: struct.unpack("q", os.read(fd, 8))[0] for name, fd in self.fds.items()}

    def close(self) -> None:
        for fd in self.fds.values():
            os.close(fd)
        self.fds.clear()
        self.available = False


def _counter_summary(before, after, total_bytes) -> dict:
    instr = after["instructions"] - before["instructions"]
    cycles = after["cycles"] - before["cycles"]
    return {"ins_per_byte": instr / total_bytes if total_bytes else 0.0,
            "ins_per_cycle": instr / cycles if cycles else 0.0}


def run_bench(charset: CharSet, doc: CorpusDoc, kernels=tuple(KernelId), repetitions: int = 10,
              warmup: int = 2, backend=None, hw_counters: bool = False) -> list[BenchReport]:
    """Benchmark each kernel over full traversals of ``doc``.

    Each kernel runs ``warmup`` discarded traversals and then ``repetitions``
    timed ones back to back, before the next kernel starts.  Raises
    VerificationError unless every traversal of every kernel yields the same
    checksum.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    if warmup < 0:
        raise ValueError("warmup must be non-negative")
    kernels = [KernelId.parse(k) for k in kernels]
    be = resolve_backend(backend)
    runs = [traversal(k, be) for k in kernels]
    table = charset.table
    data = as_bytes_array(doc.data)
    n = data.shape[0]
    hw = HardwareCounters() if hw_counters else None

    timings = [[] for _ in kernels]
    sums = [set() for _ in kernels]
    matches = [0] * len(kernels)
    counts = [{"instructions": 0, "cycles": 0} for _ in kernels]
    try:
        for i, run in enumerate(runs):
            for _ in range(warmup):
                run(table, data)
            for _ in range(repetitions):
                before = hw.read() if hw is not None and hw.available else None
                t0 = time.perf_counter_ns()
                result = run(table, data)
                timings[i].append((time.perf_counter_ns() - t0) / 1e9)
                if before is not None:
                    after = hw.read()
                    for key in counts[i]:
                        counts[i][key] += after[key] - before[key]
                sums[i].add(int(result[0]))
                matches[i] = int(result[1])
        available = hw is not None and hw.available
    finally:
        if hw is not None:
            hw.close()

    reports = []
    for i, kernel in enumerate(kernels):
        if len(sums[i]) != 1:
            raise VerificationError(f"{kernel.value}: checksum changed between repetitions")
        if available:
            counters = _counter_summary({"instructions": 0, "cycles": 0}, counts[i], n * repetitions)
        elif hw is not None:
            counters = {"ins_per_byte": "unavailable", "ins_per_cycle": "unavailable"}
        else:
            counters = {}
        median = statistics.median(timings[i])
        elapsed = median * repetitions
        reports.append(BenchReport(
            kernel=kernel.value, corpus=doc.name, bytes=n, matches=matches[i], repetitions=repetitions,
            elapsed=elapsed, throughput=(n * repetitions / elapsed / 1e9) if elapsed > 0 else float("inf"),
            checksum=next(iter(sums[i])), min_s=min(timings[i]), median_s=median,
            mean_s=statistics.fmean(timings[i]), backend=be.name, total_bytes=n * repetitions,
            counters=counters,
        ))
    checksums = {r.checksum for r in reports}
    if len(checksums) > 1:
        detail = ", ".join(f"{r.kernel}=0x{r.checksum:016x}" for r in reports)
        raise VerificationError(f"checksum mismatch across kernels on {doc.name}: {detail}")
    return reports
