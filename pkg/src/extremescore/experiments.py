"""Seeded Monte Carlo estimation of extreme-score events.

Replication ``i`` always uses stream ``(seed, i)`` and every per-run
quantity is an integer, so the tallies merge by plain addition and
results do not depend on the worker count or scheduling order.
"""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from statistics import NormalDist
from typing import IO, Any, Sequence

import numpy as np

from . import _backend
from .asymptotics import k_schedule, thresholds
from .distributions import ScoreDistribution, parse_distribution
from .errors import ConfigError, EmptyExperiment, InvalidCounts, KOutOfRange, PlayerCountTooSmall
from .rng import RandomStream
from .statistics import scale_threshold

THRESHOLD_MODES = ("solved", "explicit", "none")

CSV_COLUMNS = (
    "n", "k", "delta", "t_scaled", "R", "successes", "phat", "ci_low", "ci_high",
    "z_mean", "z_var", "w_mean", "p_z_lt_k", "p_w_gt_0", "seed", "elapsed_ms",
)


def wilson_interval(successes: int, R: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if R < 1 or not 0 <= successes <= R:
        raise InvalidCounts(f"need 0 <= successes <= R and R >= 1, got {successes}/{R}")
    if not 0 < level < 1:
        raise InvalidCounts(f"level must be in (0, 1), got {level}")
    z = NormalDist().inv_cdf(0.5 + level / 2)
    p = successes / R
    denom = 1 + z * z / R
    center = (p + z * z / (2 * R)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / R + z * z / (4 * R * R))
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == R else min(1.0, center + half)
    return low, high


@dataclass
class Tally:
    """Integer counters over a block of replications."""

    R: int = 0
    top: int = 0
    bottom: int = 0
    z_sum: int = 0
    z_sq: int = 0
    w_sum: int = 0
    w_sq: int = 0
    z_lt_k: int = 0
    w_gt_0: int = 0
    g: int = 0
    i1: int = 0
    i1i2: int = 0
    conservation_violations: int = 0

    def __add__(self, other: "Tally") -> "Tally":
        return Tally(**{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)})


def _distinct_sorted(s: np.ndarray) -> bool:
    return bool(np.all(s[1:] != s[:-1]))


def _tally_block(
    d: ScoreDistribution, n: int, k: int, t_scaled: int | None,
    seed: int, start: int, stop: int, backend: str | None,
) -> Tally:
    impl = _backend.default if backend is None else _backend.get(backend)
    tally = Tally()
    expected_total = d.denominator * n * (n - 1) // 2
    args = (d.denominator, d.values, d.cdf, d.table, d.bits)
    small = n <= 64
    for sid in range(start, stop):
        scores = np.zeros(n, dtype=np.int64)
        impl.tournament_scores(RandomStream(seed, sid).bit_generator, scores, *args)
        tally.R += 1
        if int(scores.sum()) != expected_total:
            tally.conservation_violations += 1
        if k > 1:
            if small:
                srt = np.sort(scores)
                top, bottom = srt[n - k:], srt[:k]
            else:
                top = np.sort(np.partition(scores, n - k)[n - k:])
                bottom = np.sort(np.partition(scores, k - 1)[:k])
            tally.top += _distinct_sorted(top)
            tally.bottom += _distinct_sorted(bottom)
        else:
            tally.top += 1
            tally.bottom += 1
        if t_scaled is None:
            continue
        above = np.sort(scores[scores > t_scaled])
        z = above.size
        if z > 1:
            # run lengths of equal values -> tied pairs
            edges = np.flatnonzero(np.diff(above)) + 1
            runs = np.diff(np.concatenate(([0], edges, [z])))
            w = int((runs * (runs - 1) // 2).sum())
        else:
            w = 0
        tally.z_sum += z
        tally.z_sq += z * z
        tally.w_sum += w
        tally.w_sq += w * w
        tally.z_lt_k += z < k
        tally.w_gt_0 += w > 0
        tally.g += z >= k and w == 0
        b1 = bool(scores[0] > t_scaled)
        tally.i1 += b1
        tally.i1i2 += b1 and bool(scores[1] > t_scaled)
    return tally


def run_tally(
    d: ScoreDistribution, n: int, k: int, t_scaled: int | None, R: int, seed: int,
    workers: int = 1, backend: str | None = None,
) -> Tally:
    """Run replications ``0 .. R-1`` split into contiguous worker chunks."""
    if R < 1:
        raise EmptyExperiment("replications must be >= 1")
    if n < 2:
        raise PlayerCountTooSmall(f"need at least 2 players, got {n}")
    if not 1 <= k <= n:
        raise KOutOfRange(f"k must be in [1, {n}], got {k}")
    workers = max(1, min(int(workers), R))
    bounds = np.linspace(0, R, workers + 1).astype(int)
    if workers == 1:
        return _tally_block(d, n, k, t_scaled, seed, 0, R, backend)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(
            lambda ab: _tally_block(d, n, k, t_scaled, seed, ab[0], ab[1], backend),
            zip(bounds[:-1], bounds[1:]),
        ))
    total = Tally()
    for part in parts:
        total = total + part
    return total


@dataclass
class ExperimentConfig:
    dist: str = "m1"
    n_grid: tuple[int, ...] = (100,)
    k: int | None = None
    c: float = 1.0
    delta: float = 0.1
    replications: int = 1000
    seed: int = 0
    threshold_mode: str = "solved"
    t: float | None = None
    workers: int = 1
    distribution: ScoreDistribution | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.n_grid = tuple(int(n) for n in self.n_grid)
        if self.distribution is None:
            self.distribution = parse_distribution(self.dist)
        self.validate()

    def validate(self) -> None:
        if self.replications < 1:
            raise EmptyExperiment("replications must be >= 1")
        if not self.n_grid:
            raise ConfigError("n grid is empty")
        if any(n < 2 for n in self.n_grid):
            raise PlayerCountTooSmall(f"every n must be >= 2, got {self.n_grid}")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError(f"n grid must be strictly increasing, got {self.n_grid}")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise ConfigError(f"threshold mode must be one of {THRESHOLD_MODES}")
        if self.threshold_mode == "explicit" and self.t is None:
            raise ConfigError("explicit threshold mode needs t")
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must be in (0, 1), got {self.delta}")
        if self.k is not None and self.k < 1:
            raise KOutOfRange(f"k must be >= 1, got {self.k}")
        if self.c < 1:
            raise ConfigError(f"damping c must be >= 1, got {self.c}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    def k_for(self, n: int) -> int:
        return self.k if self.k is not None else k_schedule(n, self.c)

    def threshold_for(self, n: int, k: int) -> tuple[float | None, int | None]:
        """Unscaled and scaled threshold under the configured mode."""
        if self.threshold_mode == "none":
            return None, None
        if self.threshold_mode == "explicit":
            return self.t, scale_threshold(self.t, self.distribution.denominator)
        th = thresholds(n, k, self.delta, self.distribution)
        return th.t, th.t_scaled

    def to_dict(self) -> dict[str, Any]:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "distribution"}
        out["n_grid"] = list(self.n_grid)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)} - {"distribution"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(data)


@dataclass
class EstimateResult:
    n: int
    k: int
    delta: float
    t: float | None
    t_scaled: int | None
    R: int
    successes: int
    phat: float
    ci_low: float
    ci_high: float
    seed: int
    elapsed_ms: float
    bottom_successes: int = 0
    z_mean: float | None = None
    z_var: float | None = None
    w_mean: float | None = None
    w_var: float | None = None
    p_z_lt_k: float | None = None
    p_w_gt_0: float | None = None
    g_count: int | None = None
    tally: Tally | None = field(default=None, repr=False, compare=False)

    def same_numbers(self, other: "EstimateResult") -> bool:
        """Equality ignoring wall time."""
        a, b = asdict(self), asdict(other)
        for key in ("elapsed_ms", "tally"):
            a.pop(key), b.pop(key)
        return a == b

    def csv_row(self, timing: bool = True) -> list[str]:
        def fmt(x: Any) -> str:
            if x is None:
                return ""
            if isinstance(x, float):
                return repr(x)
            return str(x)

        values = {col: getattr(self, col) for col in CSV_COLUMNS}
        if not timing:
            values["elapsed_ms"] = None
        return [fmt(values[col]) for col in CSV_COLUMNS]


def _sample_moments(total: int, squares: int, R: int) -> tuple[float, float]:
    mean = Fraction(total, R)
    var = Fraction(squares, R) - mean * mean
    if R > 1:
        var = var * R / (R - 1)
    return float(mean), float(var)


def estimate(
    cfg: ExperimentConfig, n: int, k: int, t: float | None, t_scaled: int | None,
    backend: str | None = None,
) -> EstimateResult:
    d = cfg.distribution
    R = cfg.replications
    start = time.perf_counter()
    tally = run_tally(d, n, k, t_scaled, R, cfg.seed, workers=cfg.workers, backend=backend)
    elapsed = (time.perf_counter() - start) * 1000.0
    if tally.conservation_violations:
        raise RuntimeError(f"{tally.conservation_violations} tournaments violated score conservation")
    low, high = wilson_interval(tally.top, R)
    res = EstimateResult(
        n=n, k=k, delta=cfg.delta, t=t, t_scaled=t_scaled, R=R, successes=tally.top,
        phat=tally.top / R, ci_low=low, ci_high=high, seed=cfg.seed, elapsed_ms=elapsed,
        bottom_successes=tally.bottom, tally=tally,
    )
    if t_scaled is not None:
        res.z_mean, res.z_var = _sample_moments(tally.z_sum, tally.z_sq, R)
        res.w_mean, res.w_var = _sample_moments(tally.w_sum, tally.w_sq, R)
        res.p_z_lt_k = tally.z_lt_k / R
        res.p_w_gt_0 = tally.w_gt_0 / R
        res.g_count = tally.g
    return res


def estimate_top_k_distinct(cfg: ExperimentConfig, n: int, k: int, backend: str | None = None) -> EstimateResult:
    """Estimate P(the k largest scores are pairwise distinct)."""
    if not 1 <= k <= n:
        raise KOutOfRange(f"k must be in [1, {n}], got {k}")
    if cfg.threshold_mode == "solved" and k >= n:
        t, ts = None, None  # no threshold targets n or more players
    else:
        t, ts = cfg.threshold_for(n, k)
    return estimate(cfg, n, k, t, ts, backend=backend)


def estimate_moments(
    cfg: ExperimentConfig, n: int, t: float | None = None, k: int | None = None, backend: str | None = None,
) -> EstimateResult:
    """Moments of Z_t and W_n(t) plus P(Z_t < k) and P(W_n(t) > 0).

    With ``t`` omitted the threshold comes from the config.
    """
    k = cfg.k_for(n) if k is None else k
    if t is None:
        t, ts = cfg.threshold_for(n, k)
        if ts is None:
            raise ConfigError("estimate_moments needs a threshold")
    else:
        ts = scale_threshold(t, cfg.distribution.denominator)
    return estimate(cfg, n, k, t, ts, backend=backend)


def convergence_sweep(cfg: ExperimentConfig, backend: str | None = None) -> list[EstimateResult]:
    """One estimate per n in the grid, k from the configured rule."""
    rows = []
    for n in cfg.n_grid:
        k = cfg.k_for(n)
        if k > n:
            raise KOutOfRange(f"k={k} exceeds n={n}")
        rows.append(estimate_top_k_distinct(cfg, n, k, backend=backend))
    return rows


def write_csv(fh: IO[str], results: Sequence[EstimateResult], meta: dict[str, Any], timing: bool = True) -> None:
    """CSV with one ``#`` metadata line ahead of the header."""
    fh.write("# " + json.dumps(meta, sort_keys=True, default=str) + "\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow(r.csv_row(timing=timing))
