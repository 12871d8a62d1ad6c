"""Exact law of an iid score sum, exponential tilting and point bounds.

``S_m`` is the total of ``m`` independent match scores, i.e. one
player's score in a tournament of ``m + 1`` players. Its pmf lives on the
integer lattice ``0 .. m q`` (units of ``1 / q``).

The point-probability bound used for tied scores rests on the identity

    P(S = x) = exp(-theta x) E[exp(theta S)] P_theta(S = x)

so for ``theta > 0`` every point above ``l`` has probability at most
``exp(-theta l) E[exp(theta S)] sup_{x > l} P_theta(S = x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .asymptotics import k_schedule, thresholds
from .distributions import ScoreDistribution
from .errors import ConfigError, InexactProbabilities, MgfOverflow, SupportTooLarge

MAX_LATTICE = 10**7
MAX_RATIONAL_LATTICE = 2000
SUM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ExactPmf:
    m: int
    q: int
    mass: np.ndarray

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.mass.size)

    def mean(self) -> float:
        return float(np.dot(self.support, self.mass)) / self.q


@dataclass(frozen=True, eq=False)
class TiltedPmf:
    theta: float
    base: ExactPmf
    mass: np.ndarray

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def q(self) -> int:
        return self.base.q

    def mean(self) -> float:
        return float(np.dot(np.arange(self.mass.size), self.mass)) / self.q


def exact_pmf(d: ScoreDistribution, m: int) -> ExactPmf:
    """m-fold convolution of the match pmf, in double precision.

    Uses binary powering with direct (not FFT) convolutions: every term
    is non-negative, so entries keep full relative accuracy far into the
    tails.
    """
    if m < 1:
        raise ConfigError(f"m must be >= 1, got {m}")
    if m * d.denominator > MAX_LATTICE:
        raise SupportTooLarge(f"m*q = {m * d.denominator} exceeds {MAX_LATTICE}")
    step = d.pmf_array()
    result = None
    power = step
    e = m
    while e:
        if e & 1:
            result = power if result is None else np.convolve(result, power)
        e >>= 1
        if e:
            power = np.convolve(power, power)
    total = math.fsum(result)
    if abs(total - 1.0) > SUM_TOL:
        raise ArithmeticError(f"convolution lost mass: total {total!r}")
    mass = 0.5 * (result + result[::-1]) / total
    mass.setflags(write=False)
    return ExactPmf(m=m, q=d.denominator, mass=mass)


def exact_pmf_rational(d: ScoreDistribution, m: int) -> list[Fraction]:
    """Exact rational pmf of ``S_m``; oracle-grade, small lattices only."""
    if not d.exact:
        raise InexactProbabilities("rational convolution needs exact probabilities")
    if m < 1:
        raise ConfigError(f"m must be >= 1, got {m}")
    if m * d.denominator > MAX_RATIONAL_LATTICE:
        raise SupportTooLarge(f"m*q = {m * d.denominator} exceeds {MAX_RATIONAL_LATTICE}")
    common = math.lcm(*(p.denominator for p in d.probs))
    weights = [(v, int(p * common)) for v, p in zip(d.support, d.probs)]
    counts = [1]
    for _ in range(m):
        nxt = [0] * (len(counts) + d.denominator)
        for s, c in enumerate(counts):
            if c:
                for v, w in weights:
                    nxt[s + v] += c * w
        counts = nxt
    total = common**m
    return [Fraction(c, total) for c in counts]


def log_mgf(d: ScoreDistribution, m: int, theta: float) -> float:
    """``log E[exp(theta S_m)]`` with S_m in units of 1."""
    expo = [math.log(float(p)) + theta * v / d.denominator for v, p in zip(d.support, d.probs)]
    top = max(expo)
    return m * (top + math.log(math.fsum(math.exp(e - top) for e in expo)))


def mgf(d: ScoreDistribution, m: int, theta: float) -> float:
    if m < 1:
        raise ConfigError(f"m must be >= 1, got {m}")
    lm = log_mgf(d, m, theta)
    try:
        return math.exp(lm)
    except OverflowError:
        raise MgfOverflow(f"log MGF {lm:.1f} not representable; use log_mgf") from None


def _log_weights(pmf: ExactPmf, theta: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(pmf.mass) + theta * pmf.support / pmf.q


def tilt(pmf: ExactPmf, theta: float) -> TiltedPmf:
    """Reweight by ``exp(theta s / q)`` and renormalize (log-space)."""
    lw = _log_weights(pmf, theta)
    w = np.exp(lw - lw.max())
    mass = w / math.fsum(w)
    mass.setflags(write=False)
    return TiltedPmf(theta=theta, base=pmf, mass=mass)


def _first_above(l: float, q: int) -> int:
    """Smallest lattice point s with ``s / q > l``."""
    return max(math.floor(l * q) + 1, 0)


def sup_pmf(pmf: ExactPmf | TiltedPmf) -> tuple[int, float]:
    s = int(np.argmax(pmf.mass))
    return s, float(pmf.mass[s])


def sup_pmf_above(pmf: ExactPmf | TiltedPmf, l: float) -> tuple[int | None, float]:
    """Largest point probability over lattice points ``s / q > l``."""
    lo = _first_above(l, pmf.q)
    if lo >= pmf.mass.size:
        return None, 0.0
    s = lo + int(np.argmax(pmf.mass[lo:]))
    return s, float(pmf.mass[s])


def exact_tail(pmf: ExactPmf, t: float) -> float:
    """``P(S_m > t)`` for unscaled t, summed without cancellation."""
    lo = _first_above(t, pmf.q)
    return math.fsum(np.sort(pmf.mass[lo:]))


def exact_cdf(pmf: ExactPmf, t: float) -> float:
    """``P(S_m <= t)``."""
    lo = _first_above(t, pmf.q)
    return math.fsum(np.sort(pmf.mass[:lo]))


def chernoff_point_bound(d: ScoreDistribution, m: int, theta: float, l: float) -> float:
    """Upper bound on ``sup_{x > l} P(S_m = x)`` through the tilt at theta."""
    if not theta > 0:
        raise ConfigError(f"theta must be positive, got {theta}")
    tilted = tilt(exact_pmf(d, m), theta)
    _, p_top = sup_pmf_above(tilted, l)
    if p_top == 0.0:
        return 0.0
    return math.exp(-theta * l + log_mgf(d, m, theta) + math.log(p_top))


def collision_bound_at(d: ScoreDistribution, n: int, t: float) -> float:
    """Pairing bound on the expected number of tied pairs above t.

    Conditioning on the match between the tied pair leaves two
    independent sums of ``n - 2`` matches, giving

        E W <= C(n, 2) * sup_{x > t-1} P(S = x) * P(S > t - 1).
    """
    if n < 3:
        raise ConfigError(f"n must be >= 3, got {n}")
    pmf = exact_pmf(d, n - 2)
    _, point = sup_pmf_above(pmf, t - 1)
    return n * (n - 1) / 2 * point * exact_tail(pmf, t - 1)


def collision_expectation_bound(n: int, k: int, delta: float, d: ScoreDistribution) -> float:
    """The pairing bound evaluated at the solved threshold for (n, k, delta)."""
    return collision_bound_at(d, n, thresholds(n, k, delta, d).t)


def normalizer(n: int, k: int) -> float:
    """Growth rate ``k^2 log(n/k) / sqrt(n)`` against which the bound is compared."""
    return k * k * math.log(n / k) / math.sqrt(n)


def bound_table(
    d: ScoreDistribution, ns: Iterable[int], delta: float = 0.1, k: int | None = None, c: float = 1.0
) -> list[dict]:
    """Rows ``n, k, t, bound, bound_normalized``; k from the schedule unless fixed."""
    rows = []
    for n in ns:
        kk = k if k is not None else k_schedule(n, c)
        th = thresholds(n, kk, delta, d)
        b = collision_bound_at(d, n, th.t)
        rows.append({"n": n, "k": kk, "t": th.t, "bound": b, "bound_normalized": b / normalizer(n, kk)})
    return rows
