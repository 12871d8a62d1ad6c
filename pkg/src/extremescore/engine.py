"""Tournament simulation.

Scores accumulate in one flat int64 array while the C(n, 2) matches are
streamed row-major; the match matrix is never stored.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO

import numpy as np

from . import _backend
from .distributions import ScoreDistribution
from .errors import PlayerCountTooSmall
from .rng import RandomStream


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Scores of one tournament in units of ``1 / q``."""

    n: int
    q: int
    scores: np.ndarray

    @classmethod
    def from_values(cls, scores, q: int = 1) -> "ScoreVector":
        arr = np.array(scores, dtype=np.int64)
        return cls(n=arr.size, q=q, scores=arr)

    @property
    def total(self) -> int:
        return int(self.scores.sum())

    def conserved(self) -> bool:
        """True iff the scores add up to ``q * n (n - 1) / 2``."""
        return self.total == self.q * self.n * (self.n - 1) // 2

    def in_range(self) -> bool:
        return bool(self.scores.min(initial=0) >= 0 and self.scores.max(initial=0) <= self.q * (self.n - 1))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScoreVector):
            return NotImplemented
        return self.n == other.n and self.q == other.q and np.array_equal(self.scores, other.scores)

    def __len__(self) -> int:
        return self.n


def simulate_scores(
    d: ScoreDistribution, n: int, stream: RandomStream, backend: str | None = None
) -> ScoreVector:
    """Simulate one tournament of ``n`` players.

    Each pair i < j draws one outcome ``a``: player i gets ``a`` and
    player j gets ``q - a``. The result depends only on ``(d, n, stream)``
    and is identical across backends.
    """
    if n < 2:
        raise PlayerCountTooSmall(f"need at least 2 players, got {n}")
    impl = _backend.default if backend is None else _backend.get(backend)
    scores = np.zeros(n, dtype=np.int64)
    impl.tournament_scores(stream.bit_generator, scores, d.denominator, d.values, d.cdf, d.table, d.bits)
    return ScoreVector(n=n, q=d.denominator, scores=scores)


def simulate_degree_only(
    d: ScoreDistribution, n: int, stream: RandomStream, t: int, backend: str | None = None
) -> tuple[ScoreVector, int]:
    """Simulate and count players whose scaled score exceeds ``t``."""
    v = simulate_scores(d, n, stream, backend=backend)
    return v, int(np.count_nonzero(v.scores > t))


def write_score_vector(fh: IO[str], v: ScoreVector, seed: int, stream_id: int) -> None:
    """Debug dump: a ``#`` metadata line, then one score per line."""
    fh.write(f"# n={v.n} q={v.q} seed={seed} stream_id={stream_id}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["score"])
    for s in v.scores.tolist():
        w.writerow([s])


def read_score_vector(fh: IO[str]) -> tuple[ScoreVector, dict[str, int]]:
    header = fh.readline()
    if not header.startswith("#"):
        raise ValueError("missing metadata header")
    meta = {k: int(val) for k, val in (item.split("=") for item in header[1:].split())}
    rows = list(csv.reader(fh))
    scores = [int(r[0]) for r in rows[1:] if r]
    if len(scores) != meta["n"]:
        raise ValueError(f"expected {meta['n']} scores, found {len(scores)}")
    return ScoreVector.from_values(scores, q=meta["q"]), meta
