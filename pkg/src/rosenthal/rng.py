"""Counter-based random streams addressed by integer paths.

Every stream is a Philox4x64 generator keyed by ``SeedSequence(seed,
spawn_key=path)``. A path names *what* is being simulated (experiment
entry, grid point, replicate block), never *when* it runs, so serial and
threaded runs draw identical numbers.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

BLOCK_SIZE = 4096
SEED_MASK = (1 << 64) - 1


def substream(seed: int, *path: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & SEED_MASK, spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def blocks(replicates: int, block_size: int = BLOCK_SIZE) -> Iterator[tuple[int, int, int]]:
    """(block index, start, count) covering ``replicates`` in fixed-size blocks."""
    for b, start in enumerate(range(0, replicates, block_size)):
        yield b, start, min(block_size, replicates - start)
