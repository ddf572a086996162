"""Independent oracles and random inputs shared by the tests."""

import numpy as np

from simdscan.kernels import vector_available

COMPILED_BACKENDS = ["emulated"] + (["vector", "vector-addp"] if vector_available() else [])


def oracle_positions(data, members) -> list[int]:
    wanted = set(members)
    return [i for i, b in enumerate(bytes(data)) if b in wanted]


def random_nibble_set(rng, size=None) -> list[int]:
    """Random members with pairwise distinct low nibbles."""
    size = int(rng.integers(1, 17)) if size is None else size
    slots = rng.permutation(16)[:size]
    return [int(s) | (int(rng.integers(0, 16)) << 4) for s in slots]


def planted_doc(rng, members, length, density) -> np.ndarray:
    data = rng.integers(0, 256, length, dtype=np.uint8)
    k = int(round(density * length))
    if k:
        pos = rng.choice(length, k, replace=False)
        data[pos] = rng.choice(np.array(members, np.uint8), k)
    return data
