"""Extreme scores in random round-robin tournaments.

Simulation, exact small-n enumeration and tail/tilting numerics for the
event that the k largest scores of a tournament are pairwise distinct.
"""
from ._backend import default as _default_backend
from .asymptotics import ThresholdResult, k_schedule, mills_ratio_approx, normal_tail, solve_x, thresholds
from .distributions import (
    MatchOutcome,
    ScoreDistribution,
    draw_model,
    m1,
    make_distribution,
    mean_variance,
    parse_distribution,
    sample_match,
)
from .engine import ScoreVector, simulate_degree_only, simulate_scores
from .rng import RandomStream
from .statistics import (
    bottom_k_distinct,
    count_exceed,
    count_tied_pairs_above,
    order_scores,
    reverse_scores,
    top_k_distinct,
)

__version__ = "0.1.0"
BACKEND = _default_backend.BACKEND

__all__ = [
    "BACKEND",
    "MatchOutcome",
    "RandomStream",
    "ScoreDistribution",
    "ScoreVector",
    "ThresholdResult",
    "bottom_k_distinct",
    "count_exceed",
    "count_tied_pairs_above",
    "draw_model",
    "k_schedule",
    "m1",
    "make_distribution",
    "mean_variance",
    "mills_ratio_approx",
    "normal_tail",
    "order_scores",
    "parse_distribution",
    "reverse_scores",
    "sample_match",
    "simulate_degree_only",
    "simulate_scores",
    "solve_x",
    "thresholds",
    "top_k_distinct",
]
