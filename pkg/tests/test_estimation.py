import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rosenthal.estimation import (
    EMPIRICAL,
    Exact,
    decay_fit,
    k_statistics,
    noise_floor_filter,
    standardized_gap,
    standardized_moment,
    summarize,
)
from rosenthal.exact_models import ModelKind, ModelSpec, model_cumulant, standardized_moment_exact
from rosenthal.rng import substream
from rosenthal.simulators import SimKind, SimSpec, run_batch, sample_independent_sum, sample_wishart_logdet


def test_constant_sample():
    s = summarize([5, 5, 5], K=3)
    assert s.central_moments == (0.0, 0.0, 0.0)
    assert s.k_statistics[1] == 0.0
    assert s.raw_moments == (5.0, 25.0, 125.0)
    with pytest.raises(ValueError):
        standardized_gap(s, 3)


def test_two_point_sample():
    s = summarize([-1, 1], K=2)
    assert s.mean == 0.0 and s.central_moments[1] == 1.0 and s.k_statistics[1] == 2.0


def test_rejections():
    with pytest.raises(ValueError):
        summarize([1.0, 2.0], K=13)
    with pytest.raises(ValueError):
        summarize([1.0], K=2)
    with pytest.raises(ValueError):
        summarize([1.0, float("inf")])
    with pytest.raises(ValueError):
        Exact(0.0, 0.0)


def test_accepts_sample_batch():
    b = run_batch(SimSpec(SimKind.USTAT, 10, 500, 3))
    assert summarize(b).count == 500


def test_normal_kurtosis():
    x = substream(20, 0).standard_normal(10**6)
    s = summarize(x, K=6)
    gap, se = standardized_gap(s, 4)
    assert gap <= 4 * se
    gap, se = standardized_gap(s, 4, Exact(0.0, 1.0))
    assert gap <= 4 * se
    # sample kurtosis of a normal has asymptotic variance 24/n
    assert s.std_errors[3] == pytest.approx(math.sqrt(24 / 10**6), rel=0.3)


def population_cumulants(support):
    """Exact κ_1..κ_4 of the uniform law on a finite support."""
    n = len(support)
    mu = Fraction(sum(support), n)
    c = [Fraction(sum((x - mu) ** r for x in support), n) for r in range(5)]
    return mu, c[2], c[3], c[4] - 3 * c[2] ** 2


@pytest.mark.parametrize("support", [(0, 1, 5), (-2, 0, 3), (1, 2, 10)])
def test_k_statistics_unbiased_exhaustive(support):
    n = 4
    sums = [Fraction(0)] * 3
    for sample in itertools.product(support, repeat=n):
        mean = Fraction(sum(sample), n)
        m = [Fraction(sum((x - mean) ** r for x in sample), n) for r in range(5)]
        for i, k in enumerate(k_statistics(n, m[2], m[3], m[4], 4)):
            sums[i] += k
    total = len(support) ** n
    _, k2, k3, k4 = population_cumulants(support)
    assert sums[0] / total == k2
    assert sums[1] / total == k3
    assert sums[2] / total == k4


def test_plugin_and_k_statistics_agree_to_order_one_over_count():
    for r, count in enumerate((100, 1000, 10000)):
        for rep in range(5):
            x = substream(21, r, rep).standard_normal(count)
            s = summarize(x, K=4)
            for j in (2, 3, 4):
                diff = abs(s.plugin_cumulants[j - 1] - s.k_statistics[j - 1])
                assert diff * count < 60


def test_shift_stability():
    x = substream(22, 0).standard_normal(10**5)
    a = summarize(x, K=6)
    b = summarize(x + 1e6, K=6)
    for k in range(2, 7):
        assert b.central_moments[k - 1] == pytest.approx(a.central_moments[k - 1], rel=1e-8)
    assert b.mean == pytest.approx(a.mean + 1e6, rel=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=5, max_size=50))
def test_raw_moments_consistent(xs):
    s = summarize(xs, K=3)
    x = np.asarray(xs)
    scale = max(1.0, float(np.abs(x).max()))
    for k in (1, 2, 3):
        assert s.raw_moments[k - 1] == pytest.approx(float(np.mean(x**k)), rel=1e-9, abs=1e-9 * scale**k)


def test_rademacher_odd_gaps_vanish():
    z = sample_independent_sum([1.0] * 25, "rademacher", substream(23, 0), 200000)
    s = summarize(z, K=5)
    for k in (3, 5):
        gap, se = standardized_gap(s, k, Exact(0.0, 1.0))
        assert gap <= 4 * se


def test_wishart_exact_standardization():
    x = sample_wishart_logdet(50, 50, substream(24, 0), 100000)
    m = ModelSpec(ModelKind.LAGUERRE, 50, 50)
    s = summarize(x, K=4)
    cs = Exact(model_cumulant(m, 1), math.sqrt(model_cumulant(m, 2)))
    for k in (3, 4):
        est, se = standardized_moment(s, k, cs)
        assert abs(est - standardized_moment_exact(m, k)) <= 4 * se


def test_exact_standardization_matches_direct_formula():
    x = substream(25, 0).gamma(3.0, size=5000)
    s = summarize(x, K=5)
    for k in (3, 4, 5):
        est, _ = standardized_moment(s, k, Exact(2.5, 1.5))
        assert est == pytest.approx(float(np.mean(((x - 2.5) / 1.5) ** k)), rel=1e-9)
        est, _ = standardized_moment(s, k, EMPIRICAL)
        z = (x - x.mean()) / x.std()
        assert est == pytest.approx(float(np.mean(z**k)), rel=1e-9)


def test_standard_errors_track_replication():
    # batch-means SE vs the spread of independent repetitions
    ests, ses = [], []
    for rep in range(40):
        x = substream(26, rep).exponential(size=4000)
        s = summarize(x, K=3)
        e, se = standardized_moment(s, 3, Exact(1.0, 1.0))
        ests.append(e)
        ses.append(se)
    assert np.std(ests) == pytest.approx(np.mean(ses), rel=0.35)


def test_decay_fit_examples():
    fit = decay_fit([(10, 1e-2), (100, 1e-4), (1000, 1e-6)])
    assert fit.slope == pytest.approx(-2.0) and fit.r_squared == pytest.approx(1.0)
    with pytest.raises(ValueError):
        decay_fit([(10, 1e-1), (100, 1e-2)])
    with pytest.raises(ValueError):
        decay_fit([(10, 1e-1), (100, 0.0), (1000, 1e-3)])
    with pytest.raises(ValueError):
        decay_fit([(0, 1e-1), (100, 1e-2), (1000, 1e-3)])


@given(
    st.floats(-4, 4),
    st.floats(-5, 5),
    st.lists(st.floats(0.1, 1e4), min_size=3, max_size=8, unique=True).filter(lambda xs: max(xs) / min(xs) > 1.5),
)
def test_decay_fit_recovers_power_laws(slope, intercept, xs):
    fit = decay_fit([(x, math.exp(intercept) * x**slope) for x in xs])
    assert fit.slope == pytest.approx(slope, abs=1e-8)
    assert fit.intercept == pytest.approx(intercept, abs=1e-7)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-9)


def test_noise_floor_filter():
    kept, dropped = noise_floor_filter([(1, 0.5, 0.1), (2, 0.2, 0.1), (3, 0.0, 0.1)])
    assert [p[0] for p in kept] == [1] and [p[0] for p in dropped] == [2, 3]
