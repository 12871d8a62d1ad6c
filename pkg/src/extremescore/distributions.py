"""Per-match score distributions with finite rational support.

A distribution lives on the lattice ``{0, 1/q, ..., 1}``: support point
``v`` stands for the score ``v / q`` and the opponent receives
``(q - v) / q``. Equal player strength forces ``P(v) == P(q - v)``.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence, Union

import numpy as np

from .errors import (
    AsymmetricSupport,
    InvalidDistribution,
    NonPositiveProbability,
    ProbSumMismatch,
    SingletonSupport,
    ValueOutOfRange,
)
from ._fallback import IndexDecoder
from .rng import RandomStream

Prob = Union[Fraction, float]

FLOAT_TOL = 1e-12
# Largest exponent b for which probabilities k / 2**b are sampled by bit slicing.
MAX_DYADIC_BITS = 16


@dataclass(frozen=True)
class MatchOutcome:
    """Scaled score of player i in one match; the opponent gets ``q - a``."""

    a: int
    q: int

    @property
    def opponent(self) -> int:
        return self.q - self.a


@dataclass(frozen=True)
class ScoreDistribution:
    """Validated symmetric distribution on ``{v / q}``.

    Build instances with :func:`make_distribution`; the constructor does
    not validate. ``probs`` holds :class:`~fractions.Fraction` values when
    the distribution is exact and floats otherwise.
    """

    denominator: int
    support: tuple[int, ...]
    probs: tuple[Prob, ...]
    exact: bool
    label: str = field(default="", compare=False)
    # sampling tables, filled in __post_init__
    values: np.ndarray = field(init=False, repr=False, compare=False)
    cdf: np.ndarray = field(init=False, repr=False, compare=False)
    bits: int = field(init=False, repr=False, compare=False)
    table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.support, dtype=np.int64)
        cdf = np.cumsum(np.asarray([float(p) for p in self.probs], dtype=np.float64))
        cdf[-1] = 1.0
        bits, table = _dyadic_table(self.probs)
        for name, arr in (("values", values), ("cdf", cdf), ("table", table)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "bits", bits)

    @property
    def q(self) -> int:
        return self.denominator

    @property
    def r(self) -> int:
        return len(self.support)

    def pmf_array(self) -> np.ndarray:
        """Probabilities indexed by every lattice point ``0..q``."""
        out = np.zeros(self.denominator + 1, dtype=np.float64)
        for v, p in zip(self.support, self.probs):
            out[v] = float(p)
        return out

    def prob_of(self, value: int) -> Prob:
        try:
            return self.probs[self.support.index(value)]
        except ValueError:
            return Fraction(0) if self.exact else 0.0

    @property
    def sigma(self) -> float:
        return math.sqrt(mean_variance(self)[1])

    def to_dict(self) -> dict[str, Any]:
        def render(p: Prob) -> Any:
            if isinstance(p, Fraction):
                return f"{p.numerator}/{p.denominator}"
            return p

        return {
            "denominator": self.denominator,
            "entries": [{"value": v, "prob": render(p)} for v, p in zip(self.support, self.probs)],
        }


def _dyadic_table(probs: Sequence[Prob]) -> tuple[int, np.ndarray]:
    """Lookup table cell -> support index if every prob is k / 2**b."""
    fracs = [Fraction(p) for p in probs]
    bits = 0
    for f in fracs:
        den = f.denominator
        if den & (den - 1):
            return 0, np.zeros(0, dtype=np.int64)
        bits = max(bits, den.bit_length() - 1)
    if bits == 0 or bits > MAX_DYADIC_BITS:
        return 0, np.zeros(0, dtype=np.int64)
    counts = [int(f * (1 << bits)) for f in fracs]
    if sum(counts) != 1 << bits:
        return 0, np.zeros(0, dtype=np.int64)
    return bits, np.repeat(np.arange(len(counts), dtype=np.int64), counts)


def _coerce_prob(p: Any) -> Prob:
    if isinstance(p, bool):
        raise InvalidDistribution(f"probability must be numeric, got {p!r}")
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    if isinstance(p, str):
        try:
            return Fraction(p.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidDistribution(f"cannot parse probability {p!r}") from exc
    if isinstance(p, float):
        return p
    raise InvalidDistribution(f"unsupported probability type {type(p).__name__}")


def make_distribution(
    denominator: int, entries: Iterable[tuple[int, Any]], label: str = ""
) -> ScoreDistribution:
    """Validate ``(value, prob)`` pairs into a :class:`ScoreDistribution`.

    Probabilities may be Fractions, ints, ``"num/den"`` strings or floats.
    If any probability is a float the whole distribution is treated as
    inexact and checks use a tolerance of 1e-12; otherwise every check is
    exact.
    """
    if isinstance(denominator, bool) or not isinstance(denominator, (int, np.integer)) or denominator < 1:
        raise ValueOutOfRange(f"denominator must be a positive integer, got {denominator!r}")
    q = int(denominator)
    pairs = [(v, _coerce_prob(p)) for v, p in entries]
    for v, _ in pairs:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise ValueOutOfRange(f"support value must be an integer, got {v!r}")
        if not 0 <= v <= q:
            raise ValueOutOfRange(f"support value {v} outside [0, {q}]")
    values = [int(v) for v, _ in pairs]
    if len(set(values)) != len(values):
        raise InvalidDistribution(f"duplicate support values in {values}")
    if len(pairs) < 2:
        raise SingletonSupport("support needs at least two points")

    exact = all(isinstance(p, Fraction) for _, p in pairs)
    if not exact:
        pairs = [(v, float(p)) for v, p in pairs]
    pairs.sort(key=lambda vp: vp[0])
    for v, p in pairs:
        if not 0 < p <= 1:
            raise NonPositiveProbability(f"probability of {v} must be in (0, 1], got {p}")

    total = sum(p for _, p in pairs) if exact else math.fsum(p for _, p in pairs)
    if (total != 1) if exact else abs(total - 1.0) > FLOAT_TOL:
        raise ProbSumMismatch(f"probabilities sum to {total}, expected 1")

    lookup = dict(pairs)
    for v, p in pairs:
        mirror = lookup.get(q - v)
        if mirror is None:
            raise AsymmetricSupport(f"value {v} has no mirror {q - v}")
        if (mirror != p) if exact else abs(mirror - p) > FLOAT_TOL:
            raise AsymmetricSupport(f"P({v}) = {p} differs from P({q - v}) = {mirror}")

    return ScoreDistribution(
        denominator=q,
        support=tuple(v for v, _ in pairs),
        probs=tuple(p for _, p in pairs),
        exact=exact,
        label=label,
    )


def mean_variance(d: ScoreDistribution) -> tuple[Fraction, Fraction]:
    """Mean and variance of one match score in units of 1 (not scaled).

    The mean is always 1/2 by symmetry. For float distributions the
    variance is the exact rational value of the float computation.
    """
    half = Fraction(1, 2)
    q = d.denominator
    var = sum(Fraction(p) * (Fraction(v, q) - half) ** 2 for v, p in zip(d.support, d.probs))
    return half, var


def m1() -> ScoreDistribution:
    """Classical win/loss model."""
    return make_distribution(1, [(0, Fraction(1, 2)), (1, Fraction(1, 2))], label="m1")


def draw_model(p_draw: Any) -> ScoreDistribution:
    """Win/draw/loss with draw probability ``p_draw`` on the half-point lattice."""
    p = _coerce_prob(p_draw)
    if not 0 <= p < 1:
        raise InvalidDistribution(f"draw probability must be in [0, 1), got {p_draw!r}")
    side = (1 - p) / 2
    entries = [(0, side), (2, side)]
    if p > 0:
        entries.append((1, p))
    return make_distribution(2, entries, label=f"draw:{p_draw}")


def bundled() -> dict[str, ScoreDistribution]:
    """The distributions used throughout the test and acceptance suites."""
    return {"m1": m1(), "draw:1/2": draw_model("1/2")}


def from_dict(data: dict[str, Any], label: str = "") -> ScoreDistribution:
    try:
        entries = [(e["value"], e["prob"]) for e in data["entries"]]
        denominator = data["denominator"]
    except (KeyError, TypeError) as exc:
        raise InvalidDistribution(f"malformed distribution spec: {exc}") from exc
    return make_distribution(denominator, entries, label=label)


def parse_distribution(spec: str) -> ScoreDistribution:
    """Resolve ``m1``, ``draw:p`` or a path to a JSON distribution file."""
    if spec == "m1":
        return m1()
    if spec.startswith("draw:"):
        return draw_model(spec.split(":", 1)[1])
    if os.path.exists(spec):
        with open(spec) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidDistribution(f"{spec}: {exc}") from exc
        return from_dict(data, label=os.path.basename(spec))
    raise InvalidDistribution(f"unknown distribution {spec!r} (expected m1, draw:p or a JSON file)")


def sample_matches(d: ScoreDistribution, stream: RandomStream, size: int) -> np.ndarray:
    """``size`` independent scaled match scores for player i."""
    decoder = IndexDecoder(stream.bit_generator, d.cdf, d.table, d.bits)
    return d.values[decoder.take(size)]


def sample_match(d: ScoreDistribution, stream: RandomStream) -> MatchOutcome:
    return MatchOutcome(int(sample_matches(d, stream, 1)[0]), d.denominator)
