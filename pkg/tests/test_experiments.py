import io
import math

import mpmath as mp
import pytest

from extremescore.errors import ConfigError, EmptyExperiment, InvalidCounts, KOutOfRange
from extremescore.experiments import (
    CSV_COLUMNS,
    ExperimentConfig,
    convergence_sweep,
    estimate_moments,
    estimate_top_k_distinct,
    run_tally,
    wilson_interval,
    write_csv,
)

from conftest import BACKENDS


def cfg(**kw):
    base = dict(dist="m1", n_grid=(3,), replications=1000, seed=1, threshold_mode="none")
    base.update(kw)
    return ExperimentConfig(**base)


def test_wilson_reference():
    mp.mp.dps = 40
    z = mp.sqrt(2) * mp.erfinv(mp.mpf("0.95"))
    p, R = mp.mpf(75) / 100, 100
    center = (p + z**2 / (2 * R)) / (1 + z**2 / R)
    half = z / (1 + z**2 / R) * mp.sqrt(p * (1 - p) / R + z**2 / (4 * R**2))
    low, high = wilson_interval(75, 100)
    assert low == pytest.approx(float(center - half), rel=1e-13)
    assert high == pytest.approx(float(center + half), rel=1e-13)
    assert abs(float(z) - 1.959964) < 1e-6


@pytest.mark.parametrize("R", [1, 7, 100, 10**6])
def test_wilson_boundaries(R):
    lo, hi = wilson_interval(0, R)
    assert lo == 0.0 and 0 < hi <= 1
    lo, hi = wilson_interval(R, R)
    assert hi == 1.0 and 0 <= lo < 1
    for s in (0, R // 3, R):
        lo, hi = wilson_interval(s, R)
        assert 0 <= lo <= s / R <= hi <= 1


def test_wilson_invalid():
    with pytest.raises(InvalidCounts):
        wilson_interval(5, 4)
    with pytest.raises(InvalidCounts):
        wilson_interval(0, 0)


def test_two_players_always_distinct():
    res = estimate_top_k_distinct(cfg(n_grid=(2,), replications=500), 2, 2)
    assert res.phat == 1.0 and res.successes == 500


def test_k1_trivial():
    for n in (3, 10, 50):
        assert estimate_top_k_distinct(cfg(n_grid=(n,), replications=200), n, 1).phat == 1.0


def test_three_players_within_wilson():
    res = estimate_top_k_distinct(cfg(replications=10**5, seed=8), 3, 2)
    assert res.ci_low <= 0.75 <= res.ci_high


def test_moments_three_players():
    R = 10**5
    res = estimate_moments(cfg(replications=R, seed=21, k=2), 3, t=0.5)
    # oracle: E Z = 9/4, Var Z = 3/16; E W = 3/4, Var W = 27/16
    assert abs(res.z_mean - 9 / 4) <= 4 * math.sqrt(3 / 16 / R)
    assert abs(res.w_mean - 3 / 4) <= 4 * math.sqrt(27 / 16 / R)
    assert res.z_var <= res.z_mean * (1 + 5 / math.sqrt(R))


def test_moments_at_maximum_threshold():
    res = estimate_moments(cfg(n_grid=(6,), replications=300, k=2), 6, t=5.0)
    assert res.z_mean == 0 and res.w_mean == 0 and res.p_w_gt_0 == 0 and res.p_z_lt_k == 1


def test_containment_on_every_run():
    for seed in range(3):
        c = cfg(n_grid=(40,), replications=400, seed=seed, threshold_mode="solved", k=3)
        res = estimate_top_k_distinct(c, 40, 3)
        assert res.g_count <= res.successes


def test_worker_independence():
    base = dict(n_grid=(30,), replications=301, seed=99, threshold_mode="solved", k=2)
    one = estimate_top_k_distinct(cfg(workers=1, **base), 30, 2)
    four = estimate_top_k_distinct(cfg(workers=4, **base), 30, 2)
    assert one.same_numbers(four)
    assert one.tally == four.tally


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
def test_backend_independence(win_loss):
    a = run_tally(win_loss, 25, 3, 14, 200, 5, backend="python")
    b = run_tally(win_loss, 25, 3, 14, 200, 5, backend="cython")
    assert a == b


def test_sweep_determinism_and_order():
    c = cfg(n_grid=(20, 40, 80), replications=300, seed=3, threshold_mode="solved")
    rows1 = convergence_sweep(c)
    rows2 = convergence_sweep(c)
    assert [r.n for r in rows1] == [20, 40, 80]
    assert all(a.same_numbers(b) for a, b in zip(rows1, rows2))
    single = convergence_sweep(cfg(n_grid=(20,), replications=50))
    assert len(single) == 1


def test_csv_output():
    c = cfg(n_grid=(20, 40), replications=100, threshold_mode="solved")
    buf = io.StringIO()
    write_csv(buf, convergence_sweep(c), {"seed": 1}, timing=False)
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("# ")
    assert lines[1].split(",") == list(CSV_COLUMNS)
    assert len(lines) == 4
    assert lines[2].endswith(",")  # elapsed_ms left blank without timing


@pytest.mark.parametrize(
    "kw, err",
    [
        (dict(replications=0), EmptyExperiment),
        (dict(n_grid=(10, 5)), ConfigError),
        (dict(n_grid=(1,)), ConfigError),
        (dict(threshold_mode="explicit"), ConfigError),
        (dict(threshold_mode="sometimes"), ConfigError),
        (dict(k=0), KOutOfRange),
        (dict(workers=0), ConfigError),
    ],
)
def test_config_validation(kw, err):
    with pytest.raises(err):
        cfg(**kw)


def test_config_roundtrip():
    c = cfg(n_grid=(10, 20), k=3, threshold_mode="explicit", t=6.5)
    again = ExperimentConfig.from_dict(c.to_dict())
    assert again.to_dict() == c.to_dict()
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"n_grid": [5], "bogus": 1})


@pytest.mark.slow
def test_fixed_k_trend_increases_with_n():
    rows = convergence_sweep(cfg(n_grid=(100, 400, 1600), k=2, replications=2000, seed=17,
                                 threshold_mode="solved"))
    for a, b in zip(rows, rows[1:]):
        assert b.ci_low > a.ci_high, (a.n, a.phat, b.n, b.phat)
