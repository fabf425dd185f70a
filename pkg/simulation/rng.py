"""Replayable random streams for sampling.

Shots are cut into fixed-size blocks; block b draws from
Generator(Philox(SeedSequence(seed).spawn(blocks)[b])).  The stream of a shot
depends only on (seed, block size, shot index), never on scheduling.
"""

import secrets
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from errors import SchemaError

DEFAULT_SHOT_BLOCK = 4096


@dataclass(frozen=True)
class ShotBlock:
    index: int
    start: int
    count: int
    rng: np.random.Generator


def fresh_seed() -> int:
    return secrets.randbits(63)


def shot_blocks(seed: int, shots: int, block_size: Optional[int] = None) -> Iterator[ShotBlock]:
    if seed < 0:
        raise SchemaError(f"seed must be non-negative, got {seed}", field="seed")
    block_size = block_size or DEFAULT_SHOT_BLOCK
    n_blocks = max(1, -(-shots // block_size))
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    for b, child in enumerate(children):
        start = b * block_size
        count = min(block_size, shots - start)
        if count <= 0:
            return
        yield ShotBlock(b, start, count, np.random.Generator(np.random.Philox(child)))
