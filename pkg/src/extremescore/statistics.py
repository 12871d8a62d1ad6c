"""Observables of a score vector: order statistics, exceedances, ties.

Thresholds are scaled integers and every comparison is strict, so
``count_exceed(v, t)`` counts players with ``score > t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .engine import ScoreVector
from .errors import KOutOfRange

Scores = Union[ScoreVector, np.ndarray, list, tuple]


@dataclass(frozen=True, eq=False)
class ScoreSummary:
    sorted: np.ndarray
    n: int
    q: int


def _arr(v: Scores) -> np.ndarray:
    if isinstance(v, ScoreVector):
        return v.scores
    return np.asarray(v, dtype=np.int64)


def scale_threshold(t: float | Fraction, q: int) -> int:
    """Map a real threshold onto the integer lattice as ``floor(t * q)``.

    ``s / q > t`` and ``s > floor(t * q)`` agree for every integer ``s``
    unless ``t * q`` is itself an integer, in which case the floor
    convention is used as is.
    """
    if isinstance(t, (Fraction, int)):
        return math.floor(Fraction(t) * q)
    return math.floor(t * q)


def order_scores(v: Scores) -> ScoreSummary:
    arr = _arr(v)
    q = v.q if isinstance(v, ScoreVector) else 1
    return ScoreSummary(sorted=np.sort(arr), n=arr.size, q=q)


def count_exceed(v: Scores, t: int) -> int:
    return int(np.count_nonzero(_arr(v) > t))


def count_tied_pairs_above(v: Scores, t: int) -> int:
    """Number of unordered pairs sharing a common score above ``t``."""
    above = _arr(v)
    above = above[above > t]
    if above.size < 2:
        return 0
    _, mult = np.unique(above, return_counts=True)
    return int((mult * (mult - 1) // 2).sum())


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise KOutOfRange(f"k must be in [1, {n}], got {k}")


def _distinct(values: np.ndarray) -> bool:
    if values.size < 2:
        return True
    s = np.sort(values)
    return bool(np.all(s[1:] != s[:-1]))


def top_k_distinct(v: Scores, k: int) -> bool:
    """True iff the k largest scores are pairwise distinct."""
    arr = _arr(v)
    n = arr.size
    _check_k(k, n)
    if k == 1:
        return True
    top = np.partition(arr, n - k)[n - k:] if k < n else arr
    return _distinct(top)


def bottom_k_distinct(v: Scores, k: int) -> bool:
    arr = _arr(v)
    n = arr.size
    _check_k(k, n)
    if k == 1:
        return True
    bottom = np.partition(arr, k - 1)[:k] if k < n else arr
    return _distinct(bottom)


def reverse_scores(v: ScoreVector) -> ScoreVector:
    """Scores after reversing every match: ``s -> q (n - 1) - s``."""
    return ScoreVector(n=v.n, q=v.q, scores=v.q * (v.n - 1) - v.scores)
