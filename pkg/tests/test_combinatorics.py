import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rosenthal.combinatorics import (
    CumulantSequence,
    OrderOverflowError,
    compositions_min2,
    cumulants_from_moments,
    gaussian_moment,
    leonov_shiryaev_moment,
    moments_from_cumulants,
    multinomial,
    standardized_moment_gap,
)


def brute_compositions(k, j):
    return sorted(c for c in itertools.product(range(2, k + 1), repeat=j) if sum(c) == k)


@pytest.mark.parametrize(
    "k,j,expected",
    [(4, 2, [(2, 2)]), (6, 2, [(2, 4), (3, 3), (4, 2)]), (5, 3, []), (2, 1, [(2,)])],
)
def test_compositions_examples(k, j, expected):
    assert [tuple(c) for c in compositions_min2(k, j)] == expected


@pytest.mark.parametrize("k", range(2, 17))
def test_composition_count_and_order(k):
    for j in range(1, k // 2 + 2):
        comps = compositions_min2(k, j)
        expected = math.comb(k - j - 1, j - 1) if 2 * j <= k else 0
        assert len(comps) == expected
        if k <= 12:
            assert [tuple(c) for c in comps] == brute_compositions(k, j)
        for c in comps:
            assert c.total == k and min(c.parts) >= 2


def test_compositions_reject_bad_input():
    with pytest.raises(ValueError):
        compositions_min2(1, 1)
    with pytest.raises(ValueError):
        compositions_min2(4, 0)


@pytest.mark.parametrize("k,parts,value", [(4, (2, 2), 6), (6, (3, 3), 20), (10, (2,) * 5, 113400)])
def test_multinomial_examples(k, parts, value):
    assert multinomial(k, parts) == value
    assert multinomial(k, parts) == math.factorial(k) // math.prod(math.factorial(p) for p in parts)


def test_multinomial_errors():
    with pytest.raises(OrderOverflowError):
        multinomial(21, (10, 11))
    with pytest.raises(ValueError):
        multinomial(5, (2, 2))


@given(st.lists(st.integers(1, 8), min_size=1, max_size=5).filter(lambda p: sum(p) <= 20), st.randoms())
def test_multinomial_permutation_invariant(parts, rnd):
    shuffled = list(parts)
    rnd.shuffle(shuffled)
    assert multinomial(sum(parts), parts) == multinomial(sum(parts), shuffled)


def test_gaussian_examples():
    assert gaussian_moment(4) == 3
    assert gaussian_moment(7) == 0
    assert gaussian_moment(8) == 105
    assert gaussian_moment(0) == 1


@pytest.mark.parametrize("k", range(1, 13))
def test_gaussian_fixed_point(k):
    cums = [0, 1] + [0] * 10
    m = moments_from_cumulants(cums)
    expected = 0 if k % 2 else math.factorial(k) // (2 ** (k // 2) * math.factorial(k // 2))
    assert m.moment(k) == expected == gaussian_moment(k)


def test_moments_examples():
    assert moments_from_cumulants([0, 1, 0, 0]).values == (0, 1, 0, 3)
    assert moments_from_cumulants([0, 1, 0, 0, 0, 0]).moment(6) == 15
    assert moments_from_cumulants([1, 1, 1]).values == (1, 2, 5)


def test_cumulants_examples():
    assert cumulants_from_moments([0, 1, 0, 3]).values == (0, 1, 0, 0)
    assert cumulants_from_moments([1, 2, 5]).values == (1, 1, 1)
    # Poisson(1) moments are Bell numbers
    assert cumulants_from_moments([1, 2, 5, 15, 52, 203]).values == (1,) * 6


def test_poisson_moments_are_touchard_polynomials():
    lam = Fraction(3, 2)
    moms = moments_from_cumulants([lam] * 8)
    for k in range(1, 9):
        # Touchard: Σ_i S(k,i) λ^i, Stirling numbers by recurrence
        S = [[0] * (k + 1) for _ in range(k + 1)]
        S[0][0] = 1
        for a in range(1, k + 1):
            for b in range(1, a + 1):
                S[a][b] = b * S[a - 1][b] + S[a - 1][b - 1]
        assert moms.moment(k) == sum(S[k][i] * lam**i for i in range(k + 1))


def test_exponential_moments_are_factorials():
    m = moments_from_cumulants([math.factorial(j - 1) for j in range(1, 11)])
    assert m.values == tuple(math.factorial(k) for k in range(1, 11))


def test_order_cap():
    with pytest.raises(OrderOverflowError):
        moments_from_cumulants([0, 1] + [0] * 19)


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        CumulantSequence([0.0, float("nan")])


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(finite, min_size=1, max_size=10))
def test_round_trip(cums):
    back = cumulants_from_moments(moments_from_cumulants(cums)).floats()
    for a, b in zip(back, cums):
        assert a == pytest.approx(b, rel=1e-10, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(st.lists(finite, min_size=3, max_size=9))
def test_leonov_shiryaev_centered_form(cums):
    cums = [0.0] + cums
    m = moments_from_cumulants(cums)
    for k in range(1, len(cums) + 1):
        assert leonov_shiryaev_moment(cums, k, centered=True) == m.moment(k)


@settings(max_examples=100, deadline=None)
@given(st.lists(finite, min_size=1, max_size=8))
def test_leonov_shiryaev_general_form(cums):
    m = moments_from_cumulants(cums)
    for k in range(1, len(cums) + 1):
        assert leonov_shiryaev_moment(cums, k, centered=False) == m.moment(k)


@settings(max_examples=100, deadline=None)
@given(st.lists(finite, min_size=1, max_size=8))
def test_moment_gap_matches_difference(tail):
    std = [0, 1] + tail
    m = moments_from_cumulants(std)
    for k in range(3, len(std) + 1):
        assert standardized_moment_gap(std, k) == m.moment(k) - gaussian_moment(k)


@settings(max_examples=50, deadline=None)
@given(st.lists(finite, min_size=2, max_size=8))
def test_variance_nonnegative_for_real_cumulants(cums):
    cums = [cums[0], abs(cums[1])] + cums[2:]
    m = moments_from_cumulants(cums)
    assert m.moment(2) >= m.moment(1) ** 2
