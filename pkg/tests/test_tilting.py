import math
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from extremescore.asymptotics import k_schedule, normal_tail, thresholds
from extremescore.distributions import draw_model, m1, make_distribution
from extremescore.errors import ConfigError, InexactProbabilities, MgfOverflow, SupportTooLarge
from extremescore.oracle import enumerate_exact
from extremescore.tilting import (
    ExactPmf,
    chernoff_point_bound,
    collision_bound_at,
    collision_expectation_bound,
    exact_cdf,
    exact_pmf,
    exact_pmf_rational,
    exact_tail,
    log_mgf,
    mgf,
    normalizer,
    sup_pmf,
    sup_pmf_above,
    tilt,
)

from conftest import BUNDLED

# 40-digit evaluations of the binomial sums
BIN100_TAIL_GE_56 = 0.13562651203691736535
BIN100_CENTRAL = 0.079589237387178761498


def test_binomial_small(win_loss):
    assert exact_pmf(win_loss, 2).mass.tolist() == [0.25, 0.5, 0.25]


@pytest.mark.parametrize("s", [50, 60, 70])
def test_binomial_100_against_log_binomial(win_loss, s):
    expected = math.exp(math.lgamma(101) - math.lgamma(s + 1) - math.lgamma(101 - s) - 100 * math.log(2))
    assert exact_pmf(win_loss, 100).mass[s] == pytest.approx(expected, rel=1e-12)
    assert exact_pmf(win_loss, 100).mass[s] == pytest.approx(comb(100, s) / 2**100, rel=1e-12)


def test_identity_convolution(half_draw):
    assert exact_pmf(half_draw, 1).mass.tolist() == [0.25, 0.5, 0.25]


@pytest.mark.parametrize("d", BUNDLED + [pytest.param(draw_model("1/3"), id="draw-third")])
def test_float_convolution_matches_rational(d):
    for m in (1, 7, 40):
        fl = exact_pmf(d, m).mass
        ex = np.array([float(p) for p in exact_pmf_rational(d, m)])
        np.testing.assert_allclose(fl, ex, rtol=1e-12, atol=0)


@pytest.mark.parametrize("d", BUNDLED)
def test_associativity_and_symmetry(d):
    a, b = 13, 29
    joint = np.convolve(exact_pmf(d, a).mass, exact_pmf(d, b).mass)
    np.testing.assert_allclose(exact_pmf(d, a + b).mass, joint, atol=1e-10)
    mass = exact_pmf(d, 57).mass
    assert np.array_equal(mass, mass[::-1])
    assert abs(math.fsum(mass) - 1) < 1e-10


def test_guards(win_loss, float_dist):
    with pytest.raises(SupportTooLarge):
        exact_pmf(make_distribution(1000, [(0, "1/2"), (1000, "1/2")]), 10**4 + 1)
    with pytest.raises(SupportTooLarge):
        exact_pmf_rational(win_loss, 2001)
    with pytest.raises(InexactProbabilities):
        exact_pmf_rational(float_dist, 3)
    with pytest.raises(ConfigError):
        exact_pmf(win_loss, 0)


def test_mgf(win_loss, half_draw):
    assert mgf(half_draw, 5, 0.0) == 1.0
    assert mgf(win_loss, 1, math.log(2)) == pytest.approx(1.5, rel=1e-15)
    for m in (1, 2, 17, 100):
        assert mgf(half_draw, m, 0.7) == pytest.approx(mgf(half_draw, 1, 0.7) ** m, rel=1e-12)
    with pytest.raises(MgfOverflow):
        mgf(win_loss, 10**4, 200.0)
    assert log_mgf(win_loss, 10**4, 200.0) > 709


def test_mgf_matches_pmf(half_draw):
    pmf = exact_pmf(half_draw, 30)
    direct = math.fsum(pmf.mass * np.exp(0.3 * np.arange(pmf.mass.size) / 2))
    assert mgf(half_draw, 30, 0.3) == pytest.approx(direct, rel=1e-12)


def test_tilt(win_loss):
    base = exact_pmf(win_loss, 1)
    assert np.array_equal(tilt(base, 0.0).mass, base.mass)
    np.testing.assert_allclose(tilt(base, math.log(3)).mass, [0.25, 0.75], rtol=1e-15)
    pmf = exact_pmf(win_loss, 50)
    means = [tilt(pmf, th).mean() for th in np.linspace(-3, 3, 25)]
    assert all(b > a for a, b in zip(means, means[1:]))
    big = tilt(exact_pmf(win_loss, 2000), 5.0)  # theta * m far beyond exp range
    assert abs(math.fsum(big.mass) - 1) < 1e-10


def test_sup_pmf(win_loss):
    assert sup_pmf(exact_pmf(win_loss, 2)) == (1, 0.5)
    s, p = sup_pmf(exact_pmf(win_loss, 100))
    assert s == 50 and p == pytest.approx(BIN100_CENTRAL, rel=1e-12)
    for m in (100, 400, 1600):
        assert sup_pmf(exact_pmf(win_loss, m))[1] * math.sqrt(m) == pytest.approx(math.sqrt(2 / math.pi), rel=0.05)
    pmf = exact_pmf(win_loss, 100)
    assert sup_pmf_above(pmf, 55) == (56, pmf.mass[56])
    assert sup_pmf_above(pmf, 100) == (None, 0.0)
    assert sup_pmf_above(pmf, -3)[0] == 50


@pytest.mark.parametrize("d", BUNDLED)
def test_concentration_constant_recorded(d):
    consts = [sup_pmf(exact_pmf(d, m))[1] * math.sqrt(m) for m in (25, 100, 400, 1600)]
    # bounded: the sequence settles rather than growing
    assert max(consts) < 1.0
    assert max(consts) / min(consts) < 1.1


def test_exact_tail(win_loss):
    pmf = exact_pmf(win_loss, 100)
    assert exact_tail(pmf, -0.5) == pytest.approx(1.0, abs=1e-15)
    assert exact_tail(pmf, 55) == pytest.approx(BIN100_TAIL_GE_56, rel=1e-12)
    for t in (-1, 0, 10.5, 50, 55, 70.2, 99, 100):
        assert abs(exact_tail(pmf, t) + exact_cdf(pmf, t) - 1) <= 1e-12


@pytest.mark.parametrize("x", [1, 2, 3])
def test_normal_approximation_band(win_loss, x):
    m = 400
    ratio = exact_tail(exact_pmf(win_loss, m), m / 2 + x * math.sqrt(m) / 2) / normal_tail(x)
    assert 0.7 <= ratio <= 1.3


@pytest.mark.parametrize("d", BUNDLED)
def test_chernoff_bound_dominates(d):
    for m in (10, 60):
        pmf = exact_pmf(d, m)
        for l in (m / 2, m * 0.6, m * 0.75):
            exact_sup = sup_pmf_above(pmf, l)[1]
            for theta in (0.01, 0.3, 1.0, 3.0):
                assert chernoff_point_bound(d, m, theta, l) >= exact_sup


def test_chernoff_at_saddle(win_loss):
    m, l = 100, 55
    theta = math.log(l / (m - l))
    bound = chernoff_point_bound(win_loss, m, theta, l)
    exact_sup = sup_pmf_above(exact_pmf(win_loss, m), l)[1]
    assert exact_sup <= bound <= 10 * exact_sup


def test_chernoff_continuity_at_zero(win_loss):
    m, l = 60, 33
    base_sup = sup_pmf_above(exact_pmf(win_loss, m), l)[1]
    theta = 1e-7
    expected = base_sup * math.exp(-theta * l)
    assert chernoff_point_bound(win_loss, m, theta, l) == pytest.approx(expected, rel=1e-5)
    with pytest.raises(ConfigError):
        chernoff_point_bound(win_loss, m, 0.0, l)


@pytest.mark.parametrize("d", BUNDLED)
def test_collision_bound_dominates_oracle(d):
    n = 4
    report = enumerate_exact(d, n)
    for T, ts in report.thresholds.items():
        t = T / d.denominator
        assert collision_bound_at(d, n, t) >= float(ts.E_W)


def test_collision_bound_monotone(win_loss):
    n = 60
    vals = [collision_bound_at(win_loss, n, t) for t in np.arange(25, 60, 0.5)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_collision_bound_scaling(win_loss):
    normed = []
    for n in (500, 1000, 2000):
        k = k_schedule(n)
        normed.append(collision_expectation_bound(n, k, 0.1, win_loss) / normalizer(n, k))
    assert max(normed) / min(normed) <= 50


def test_collision_bound_vs_monte_carlo_threshold(win_loss):
    th = thresholds(2000, 5, 0.1, win_loss)
    ratio = 2000 * exact_tail(exact_pmf(win_loss, 1999), th.t) / (1.1 * 5)
    assert 0.5 <= ratio <= 2
