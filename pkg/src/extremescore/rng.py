"""Seeded random streams, one per replication."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass
class RandomStream:
    """A reproducible stream of random bits.

    ``(seed, stream_id)`` fully determines every draw. The stream id is
    used as the spawn key of a :class:`numpy.random.SeedSequence`, so
    different ids give statistically independent PCG64 streams without
    any coordination between workers.

    A stream is single-owner: do not share one between threads.
    """

    seed: int
    stream_id: int = 0
    bit_generator: np.random.PCG64 = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.stream_id < 0:
            raise ValueError(f"stream_id must be non-negative, got {self.stream_id}")
        self.seed = int(self.seed) & _MASK64
        ss = np.random.SeedSequence(self.seed, spawn_key=(int(self.stream_id),))
        self.bit_generator = np.random.PCG64(ss)

    def generator(self) -> np.random.Generator:
        """A Generator view sharing this stream's state."""
        return np.random.Generator(self.bit_generator)
