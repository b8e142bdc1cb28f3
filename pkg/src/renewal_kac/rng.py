"""Reproducible, splittable random streams.

A stream is identified by ``(master_seed, path)``. Children are derived by
appending an integer to the path, so replicate ``r`` of scale index ``n`` can
be regenerated in isolation from ``RngStream(seed).child(n).child(r)``
without replaying any sibling stream.
"""

from __future__ import annotations

import numpy as np

ALGORITHM = "philox4x64-seedsequence"

_SEED_MASK = (1 << 64) - 1


class RngStream:
    """Single-owner random stream backed by a counter-based Philox generator.

    The key is derived from ``numpy.random.SeedSequence(master_seed,
    spawn_key=path)``; distinct paths give statistically independent streams.
    Draws mutate the stream, so a stream must not be shared between threads.
    """

    algorithm = ALGORITHM

    def __init__(self, master_seed: int, path: tuple[int, ...] = ()):
        if not 0 <= int(master_seed) <= _SEED_MASK:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {master_seed}")
        if any(int(p) < 0 for p in path):
            raise ValueError("stream path entries must be non-negative")
        self.master_seed = int(master_seed)
        self.path = tuple(int(p) for p in path)
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.Philox(seq))

    def child(self, index: int) -> "RngStream":
        return RngStream(self.master_seed, self.path + (int(index),))

    def provenance(self) -> dict:
        return {"algorithm": self.algorithm, "master_seed": self.master_seed, "path": list(self.path)}

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, path={self.path})"
