"""Normal tails and the extreme-score threshold solver.

The threshold for n players and target count k is

    t = (n - 1) / 2 + x * sqrt(n - 1) * sigma

with x the root of ``n * phi(x) / x = (1 + delta) * k``, i.e. the level at
which the Gaussian tail predicts about ``(1 + delta) k`` players above t.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .distributions import ScoreDistribution, mean_variance
from .errors import ConfigError, NonPositiveX, NoRootInBracket
from .statistics import scale_threshold

X_MIN = 1e-6
RESIDUAL_TOL = 1e-10
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x - _LOG_SQRT_2PI)


def normal_tail(x: float) -> float:
    """``1 - Phi(x)`` through erfc, accurate in the far right tail."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def mills_ratio_approx(x: float) -> float:
    """``phi(x) / x``, the first-order approximation of ``1 - Phi(x)``."""
    if not x > 0:
        raise NonPositiveX(f"x must be positive, got {x}")
    return normal_pdf(x) / x


def _log_excess(x: float, n: int, target: float) -> float:
    # log(n phi(x) / x) - log(target); strictly decreasing in x
    return math.log(n) - _LOG_SQRT_2PI - 0.5 * x * x - math.log(x) - math.log(target)


def saddle_residual(x: float, n: int, k: int, delta: float) -> float:
    """Relative residual ``|n phi(x)/x - (1+delta) k| / ((1+delta) k)``."""
    target = (1.0 + delta) * k
    return abs(math.expm1(_log_excess(x, n, target)))


def solve_x(n: int, k: int, delta: float = 0.1) -> float:
    """Root of ``n phi(x) / x = (1 + delta) k`` by bisection."""
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    if not 1 <= k < n:
        raise ConfigError(f"k must satisfy 1 <= k < n, got k={k}, n={n}")
    if not 0 < delta < 1:
        raise ConfigError(f"delta must be in (0, 1), got {delta}")
    target = (1.0 + delta) * k
    lo, hi = X_MIN, math.sqrt(2.0 * math.log(n)) + 10.0
    if _log_excess(lo, n, target) < 0:
        raise NoRootInBracket(f"no root above x={X_MIN} for n={n}, k={k}, delta={delta}")
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _log_excess(mid, n, target) > 0:
            lo = mid
        else:
            hi = mid
    x = lo if abs(_log_excess(lo, n, target)) <= abs(_log_excess(hi, n, target)) else hi
    res = saddle_residual(x, n, k, delta)
    if res > RESIDUAL_TOL:
        raise NoRootInBracket(f"bisection stalled with residual {res:.3e}")
    return x


@dataclass(frozen=True)
class ThresholdResult:
    n: int
    k: int
    delta: float
    sigma: float
    x: float
    t: float
    l: float
    residual: float
    asymptotic_gap: float
    t_scaled: int

    def to_dict(self) -> dict:
        return asdict(self)


def thresholds(
    n: int, k: int, delta: float, d: ScoreDistribution, x: float | None = None
) -> ThresholdResult:
    """Solve for x and derive the score threshold t and its shifted form l.

    ``l = (n-2)/2 + x sqrt(n-2) sigma`` is the threshold seen by a player
    once one opponent is removed; passing ``x`` skips the solver.
    """
    sigma = math.sqrt(mean_variance(d)[1])
    if x is None:
        x = solve_x(n, k, delta)
        residual = saddle_residual(x, n, k, delta)
    else:
        residual = saddle_residual(x, n, k, delta) if 1 <= k < n else float("nan")
    t = 0.5 * (n - 1) + x * math.sqrt(n - 1) * sigma
    l = 0.5 * (n - 2) + x * math.sqrt(max(n - 2, 0)) * sigma
    gap = x * x - 2.0 * math.log(n / k)
    return ThresholdResult(
        n=n, k=k, delta=delta, sigma=sigma, x=x, t=t, l=l,
        residual=residual, asymptotic_gap=gap, t_scaled=scale_threshold(t, d.denominator),
    )


def k_schedule(n: int, c: float = 1.0) -> int:
    """``max(1, floor((n / ln n) ** 0.25 / c))``, a slowly growing k."""
    if n <= 1:
        raise ConfigError(f"k_schedule needs n > 1, got {n}")
    if c < 1:
        raise ConfigError(f"damping c must be >= 1, got {c}")
    return max(1, math.floor((n / math.log(n)) ** 0.25 / c))
