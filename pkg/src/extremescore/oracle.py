"""Brute-force enumeration of every tournament outcome for small n.

All probabilities are exact rationals. Per-pair probabilities are put
over a common denominator so the enumeration only multiplies integers;
the division happens once at the end.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .distributions import ScoreDistribution
from .errors import EmptyExperiment, InexactProbabilities, StateSpaceTooLarge

MAX_OUTCOMES = 10**8


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


@dataclass(frozen=True)
class ThresholdStats:
    """Exact moments at scaled threshold T (players with score > T)."""

    t_scaled: int
    q: int
    E_Z: Fraction
    E_Z2: Fraction
    E_W: Fraction
    E_W2: Fraction
    P_W_gt_0: Fraction
    P_I1: Fraction
    P_I2: Fraction
    P_I1I2: Fraction
    P_Z_lt_k: dict[int, Fraction]
    P_G: dict[int, Fraction]  # P(Z >= k and W == 0)

    @property
    def t(self) -> Fraction:
        """Midpoint between T and T + 1, in units of 1."""
        return Fraction(2 * self.t_scaled + 1, 2 * self.q)

    @property
    def Var_Z(self) -> Fraction:
        return self.E_Z2 - self.E_Z**2

    @property
    def Var_W(self) -> Fraction:
        return self.E_W2 - self.E_W**2

    @property
    def Cov_I1_I2(self) -> Fraction:
        return self.P_I1I2 - self.P_I1 * self.P_I2

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"t_scaled": self.t_scaled, "t": _frac(self.t)}
        for name in ("E_Z", "Var_Z", "E_W", "Var_W", "P_W_gt_0", "P_I1", "P_I1I2", "Cov_I1_I2"):
            out[name] = _frac(getattr(self, name))
        out["P_Z_lt_k"] = {str(k): _frac(v) for k, v in self.P_Z_lt_k.items()}
        out["P_G"] = {str(k): _frac(v) for k, v in self.P_G.items()}
        return out


@dataclass
class ExactReport:
    n: int
    d_id: str
    q: int
    P_U: dict[int, Fraction]
    P_Utilde: dict[int, Fraction]
    thresholds: dict[int, ThresholdStats]
    score_law: dict[tuple[int, ...], Fraction] = field(repr=False)
    outcomes: int = 0

    def at(self, t: Fraction | float) -> ThresholdStats:
        """Stats for a real threshold t (scaled as ``floor(t q)``)."""
        return self.thresholds[math.floor(Fraction(t) * self.q)]

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"n": self.n, "dist": self.d_id, "q": self.q, "outcomes": self.outcomes}
        for k, p in self.P_U.items():
            out[f"P_U[{k}]"] = _frac(p)
        for k, p in self.P_Utilde.items():
            out[f"P_Utilde[{k}]"] = _frac(p)
        for ts in self.thresholds.values():
            key = _frac(ts.t)
            out[f"E_Z[{key}]"] = _frac(ts.E_Z)
            out[f"Var_Z[{key}]"] = _frac(ts.Var_Z)
            out[f"E_W[{key}]"] = _frac(ts.E_W)
            out[f"Cov_I1_I2[{key}]"] = _frac(ts.Cov_I1_I2)
        out["thresholds"] = [ts.to_dict() for ts in self.thresholds.values()]
        return out


def _distinct(values) -> bool:
    return len(set(values)) == len(values)


def _tied_pairs(values) -> int:
    counts: dict[int, int] = defaultdict(int)
    for s in values:
        counts[s] += 1
    return sum(c * (c - 1) // 2 for c in counts.values())


def _enumerate(d: ScoreDistribution, n: int):
    """Integer-weighted law of the sorted scores and of (s_1, s_2)."""
    common = math.lcm(*(Fraction(p).denominator for p in d.probs))
    weights = [int(Fraction(p) * common) for p in d.probs]
    q = d.denominator
    pairs = list(itertools.combinations(range(n), 2))
    by_sorted: dict[tuple[int, ...], int] = defaultdict(int)
    first_two: dict[tuple[int, int], int] = defaultdict(int)
    values = d.support
    for choice in itertools.product(range(d.r), repeat=len(pairs)):
        scores = [0] * n
        w = 1
        for (i, j), c in zip(pairs, choice):
            a = values[c]
            scores[i] += a
            scores[j] += q - a
            w *= weights[c]
        by_sorted[tuple(sorted(scores))] += w
        first_two[(scores[0], scores[1])] += w
    return by_sorted, first_two, common ** len(pairs)


def enumerate_exact(d: ScoreDistribution, n: int) -> ExactReport:
    """Exact law of every observable over all ``r ** C(n, 2)`` outcomes."""
    if not d.exact:
        raise InexactProbabilities("the oracle needs exact rational probabilities")
    if n < 2:
        raise EmptyExperiment(f"need at least 2 players, got {n}")
    outcomes = d.r ** (n * (n - 1) // 2)
    if outcomes > MAX_OUTCOMES:
        raise StateSpaceTooLarge(f"{outcomes} outcomes exceed the limit of {MAX_OUTCOMES}")

    by_sorted, first_two, total = _enumerate(d, n)
    law = {s: Fraction(w, total) for s, w in by_sorted.items()}
    q = d.denominator

    ks = range(1, n + 1)
    p_u = {k: Fraction(0) for k in ks}
    p_ut = {k: Fraction(0) for k in ks}
    for s, p in law.items():
        for k in ks:
            if _distinct(s[n - k:]):
                p_u[k] += p
            if _distinct(s[:k]):
                p_ut[k] += p

    stats = {}
    for T in range(-1, q * (n - 1) + 1):
        e_z = e_z2 = e_w = e_w2 = p_w = Fraction(0)
        z_lt = {k: Fraction(0) for k in ks}
        g = {k: Fraction(0) for k in ks}
        for s, p in law.items():
            above = [x for x in s if x > T]
            z = len(above)
            w = _tied_pairs(above)
            e_z += p * z
            e_z2 += p * z * z
            e_w += p * w
            e_w2 += p * w * w
            if w > 0:
                p_w += p
            for k in ks:
                if z < k:
                    z_lt[k] += p
                elif w == 0:
                    g[k] += p
        p1 = p2 = p12 = Fraction(0)
        for (s1, s2), wt in first_two.items():
            b1, b2 = s1 > T, s2 > T
            if b1:
                p1 += wt
            if b2:
                p2 += wt
            if b1 and b2:
                p12 += wt
        stats[T] = ThresholdStats(
            t_scaled=T, q=q, E_Z=e_z, E_Z2=e_z2, E_W=e_w, E_W2=e_w2, P_W_gt_0=p_w,
            P_I1=Fraction(p1, total), P_I2=Fraction(p2, total), P_I1I2=Fraction(p12, total),
            P_Z_lt_k=z_lt, P_G=g,
        )
    return ExactReport(
        n=n, d_id=d.label or "custom", q=q, P_U=p_u, P_Utilde=p_ut,
        thresholds=stats, score_law=law, outcomes=outcomes,
    )


@dataclass
class Comparison:
    name: str
    estimate: float
    exact: Fraction
    se: float
    z: float


@dataclass
class ComparisonRecord:
    n: int
    k: int
    t_scaled: int
    replications: int
    seed: int
    rows: list[Comparison]
    z_limit: float = 4.0

    @property
    def flagged(self) -> list[Comparison]:
        return [c for c in self.rows if not abs(c.z) <= self.z_limit]

    def max_abs_z(self) -> float:
        return max(abs(c.z) for c in self.rows)


def _zscore(est: float, exact: Fraction, var: Fraction, R: int) -> tuple[float, float]:
    se = math.sqrt(float(var) / R)
    if se == 0.0:
        return se, 0.0 if est == float(exact) else math.inf
    return se, (est - float(exact)) / se


def oracle_vs_montecarlo(
    d: ScoreDistribution, n: int, k: int, t: float | Fraction, R: int, seed: int,
    workers: int = 1, report: ExactReport | None = None,
) -> ComparisonRecord:
    """z-score every Monte Carlo estimator against its exact value."""
    from .experiments import run_tally

    if R < 1:
        raise EmptyExperiment("replications must be >= 1")
    report = report or enumerate_exact(d, n)
    ts = report.at(t)
    tally = run_tally(d, n, k, ts.t_scaled, R, seed, workers=workers)

    def prop(name: str, count: int, p: Fraction) -> Comparison:
        est = count / R
        se, z = _zscore(est, p, p * (1 - p), R)
        return Comparison(name, est, p, se, z)

    def mean(name: str, total: int, mu: Fraction, var: Fraction) -> Comparison:
        est = total / R
        se, z = _zscore(est, mu, var, R)
        return Comparison(name, est, mu, se, z)

    rows = [
        prop("P_U", tally.top, report.P_U[k]),
        prop("P_Utilde", tally.bottom, report.P_Utilde[k]),
        mean("E_Z", tally.z_sum, ts.E_Z, ts.Var_Z),
        mean("E_W", tally.w_sum, ts.E_W, ts.Var_W),
        prop("P_Z_lt_k", tally.z_lt_k, ts.P_Z_lt_k[k]),
        prop("P_W_gt_0", tally.w_gt_0, ts.P_W_gt_0),
        prop("P_G", tally.g, ts.P_G[k]),
        prop("P_I1", tally.i1, ts.P_I1),
        prop("P_I1I2", tally.i1i2, ts.P_I1I2),
    ]
    return ComparisonRecord(n=n, k=k, t_scaled=ts.t_scaled, replications=R, seed=seed, rows=rows)
