"""Exit criteria.  Each test carries a ``criterion`` marker; the terminal
summary prints one PASS/FAIL line per criterion."""

import io
import json
import os
import time
from pathlib import Path

import numpy as np
import pytest

from simdscan import build_charset, cli, default_html_set
from simdscan.bench import run_bench
from simdscan.corpus import SynthParams, generate_synthetic
from simdscan.kernels import (
    KernelId,
    build_index64,
    first_index_blink,
    first_index_webkit,
    get_backend,
    narrowed_mask,
    reference,
    vector_available,
)
from simdscan.stream import ScanCounters, all_matches, open_stream

from faults import faulty_backend
from helpers import COMPILED_BACKENDS, planted_doc, random_nibble_set

ALL_PATHS = ["reference"] + COMPILED_BACKENDS


def lanes_at(*positions):
    lanes = np.zeros(16, np.uint8)
    lanes[list(positions)] = 0xFF
    return lanes


# -- 1. worked examples -------------------------------------------------------

@pytest.mark.criterion(1, "worked-example fidelity")
@pytest.mark.parametrize("path", ALL_PATHS)
def test_c1a_webkit_first_index(path):
    t0 = time.perf_counter()
    lanes = lanes_at(1, 15)
    intermediate = reference.or_not(reference.LANE_INDEX, lanes)
    assert intermediate.tolist() == [0xFF, 1] + [0xFF] * 13 + [15]
    assert reference.min_across(intermediate) == 1
    assert first_index_webkit(lanes, path) == 1
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.criterion(1, "worked-example fidelity")
@pytest.mark.parametrize("path", ALL_PATHS)
def test_c1b_blink_narrowed_mask(path):
    # The stated value 0xF0000000000000F0 contradicts the narrowed bytes
    # (0x0F, 0, 0, 0, 0, 0, 0, 0xF0), which pack little-endian to
    # 0xF00000000000000F; only the latter gives first index 0.  Asserted as stated.
    t0 = time.perf_counter()
    lanes = lanes_at(0, 15)
    assert first_index_blink(lanes, path) == 0
    assert narrowed_mask(lanes, path) == 0xF0000000000000F0
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.criterion(1, "worked-example fidelity")
@pytest.mark.parametrize("path", ALL_PATHS)
def test_c1c_index64_all_members(path):
    t0 = time.perf_counter()
    assert build_index64(default_html_set(), b"<" * 64, path) == 0xFFFFFFFFFFFFFFFF
    assert time.perf_counter() - t0 < 1.0


# -- 2. exhaustive find-first -------------------------------------------------

@pytest.mark.criterion(2, "exhaustive find-first equivalence over 2^16 lane patterns")
def test_c2_exhaustive_find_first():
    t0 = time.perf_counter()
    backends = [get_backend(name) for name in COMPILED_BACKENDS]
    bits = (np.arange(1 << 16, dtype=np.uint32)[:, None] >> np.arange(16, dtype=np.uint32)) & 1
    patterns = (bits * 0xFF).astype(np.uint8)
    for pattern, lanes in enumerate(patterns):
        linear = next((i for i in range(16) if lanes[i]), None)
        assert reference.first_index_webkit(lanes) == linear
        assert reference.first_index_blink(lanes) == linear
        for be in backends:
            webkit = be.webkit_first(lanes)
            blink = int(be.blink_narrow(lanes))
            assert (None if webkit == 16 else webkit) == linear, pattern
            assert (None if blink == 0 else reference.trailing_zeros(blink) >> 2) == linear, pattern
    elapsed = time.perf_counter() - t0
    print(f"2^16 patterns x {2 + 2 * len(backends)} find-first paths in {elapsed:.2f}s")
    assert elapsed < 10.0


# -- 3. oracle equivalence ----------------------------------------------------

@pytest.mark.criterion(3, "all kernels equal the scalar oracle on 10 000 random documents")
def test_c3_oracle_equivalence():
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    backends = [get_backend(name) for name in COMPILED_BACKENDS]
    docs = 10_000
    for i in range(docs):
        members = random_nibble_set(rng)
        cs = build_charset(members)
        data = planted_doc(rng, members, int(rng.integers(0, 4097)), float(rng.uniform(0, 0.25)))
        expected = np.flatnonzero(np.isin(data, np.array(members, np.uint8)))
        for be in backends:
            for kernel in KernelId:
                got = all_matches(cs, data, kernel, be)
                assert np.array_equal(got, expected), (i, be.name, kernel.value)
        if i % 50 == 0:
            # the incremental stream API too, on a subset
            for kernel in KernelId:
                assert list(open_stream(cs, data, kernel)) == expected.tolist()
    elapsed = time.perf_counter() - t0
    print(f"{docs} documents x {len(backends)} backends x 4 kernels in {elapsed:.1f}s")
    assert elapsed < 60.0


# -- 4. non-reload ------------------------------------------------------------

@pytest.mark.criterion(4, "index64 classifies floor(n/64) blocks plus <= 63 tail bytes")
@pytest.mark.parametrize("backend_name", COMPILED_BACKENDS)
def test_c4_non_reload(backend_name):
    rng = np.random.default_rng(4)
    cs = default_html_set()
    for n in [0, 1, 63, 64, 65, 640, 1000, 4096, 65_537]:
        for density in (0.0, 0.01, 0.3, 1.0):
            data = planted_doc(rng, list(cs.members), n, density)
            counters = ScanCounters()
            found = list(open_stream(cs, data, "index64", backend_name, counters))
            assert counters.block_loads == n // 64
            assert counters.tail_bytes == n - 64 * (n // 64) <= 63
            assert len(found) == int(np.isin(data, list(cs.members)).sum())


# -- 5. corpus statistics -----------------------------------------------------

CAPTURES = {"bbc": (418417, 4420), "office": (213748, 2393), "google": (20319, 380)}
DENSITIES = {"bbc": 0.0106, "office": 0.0112, "google": 0.0187}


def stats_json(*argv):
    out = io.StringIO()
    assert cli.main(["stats", "--json", *argv], out) == 0
    return json.loads(out.getvalue())


@pytest.mark.criterion(5, "corpus statistics")
@pytest.mark.parametrize("name", sorted(CAPTURES))
def test_c5_synthetic_counts(name):
    length, _ = CAPTURES[name]
    params = SynthParams(length, DENSITIES[name], 2024)
    (row,) = stats_json("--synth", f"length={length},density={DENSITIES[name]},seed=2024")
    assert row["bytes"] == length
    assert row["matches"] == params.match_count == int(np.floor(DENSITIES[name] * length + 0.5))


def _capture(name):
    root = os.environ.get("SIMDSCAN_CAPTURES")
    if not root:
        return None
    hits = sorted(p for p in Path(root).iterdir() if name in p.name.lower())
    return hits[0] if hits else None


@pytest.mark.criterion(5, "corpus statistics")
@pytest.mark.parametrize("name", sorted(CAPTURES))
def test_c5_captured_pages(name):
    path = _capture(name)
    if path is None:
        pytest.skip("set SIMDSCAN_CAPTURES to a directory holding the bbc/office/google captures")
    (row,) = stats_json(str(path))
    assert (row["bytes"], row["matches"]) == CAPTURES[name]


# -- 6. performance ordering --------------------------------------------------

@pytest.mark.bench
@pytest.mark.criterion(6, "throughput ordering scalar < block16 < index64 (hardware dependent)")
def test_c6_performance_ordering():
    if not vector_available():
        pytest.skip("no 128-bit vector unit usable on this host")
    t0 = time.perf_counter()
    cs = default_html_set()
    doc = generate_synthetic(cs, SynthParams(418_417, 0.0106, 1))
    assert len(doc.data) >= 100 * 1024
    reports = {r.kernel: r for r in run_bench(cs, doc, repetitions=300, warmup=20)}
    gbps = {k: r.throughput for k, r in reports.items()}
    print(" ".join(f"{k}={v:.2f}GB/s" for k, v in gbps.items()))
    faster16 = max(gbps["webkit16"], gbps["blink16"])
    assert gbps["scalar"] < min(gbps["webkit16"], gbps["blink16"])
    assert faster16 < gbps["index64"]
    assert gbps["index64"] >= 2 * faster16
    assert gbps["index64"] >= 5 * gbps["scalar"]
    assert time.perf_counter() - t0 < 120


# -- 7. checksum agreement ----------------------------------------------------

@pytest.mark.criterion(7, "bench checksums agree; injected fault exits 3")
def test_c7_bench_checksums_agree():
    out = io.StringIO()
    code = cli.main(["bench", "--synth", "length=100000,density=0.0187,seed=7", "--reps", "3", "--csv"], out)
    assert code == 0
    rows = out.getvalue().strip().splitlines()[1:]
    assert len(rows) == 4
    assert len({row.rsplit(",", 1)[1] for row in rows}) == 1


@pytest.mark.criterion(7, "bench checksums agree; injected fault exits 3")
@pytest.mark.parametrize("command", ["bench", "verify"])
def test_c7_fault_injection_exits_3(monkeypatch, command):
    monkeypatch.setattr(cli, "resolve_backend", lambda name=None: faulty_backend())
    argv = [command, "--synth", "length=5000,density=0.0187,seed=7"]
    if command == "bench":
        argv += ["--reps", "2"]
    assert cli.main(argv, io.StringIO()) == 3
