from __future__ import annotations

import random
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rhostar.perms import RHO_STAR, PermutationError, count_pattern_bruteforce, enumerate_sn, formal_density, parse_permutation
from rhostar.statistic import (
    TiesPresent,
    count_six_bruteforce,
    count_six_fast,
    count_small_pattern,
    independence_test,
    ranks_to_permutation,
    read_samples,
    rho_star_statistic,
)

perms = st.integers(4, 14).flatmap(lambda n: st.permutations(range(1, n + 1)))


@given(perms)
@settings(max_examples=80, deadline=None)
def test_six_counts_match_bruteforce(pi):
    assert count_six_fast(pi) == count_six_bruteforce(pi)


@given(perms)
@settings(max_examples=40, deadline=None)
def test_statistic_is_the_density(pi):
    assert rho_star_statistic(pi) == formal_density(RHO_STAR, parse_permutation(",".join(map(str, pi))))


def test_every_small_pattern():
    rng = random.Random(8)
    pi = parse_permutation(",".join(map(str, rng.sample(range(1, 16), 15))))
    for k in (1, 2, 3, 4):
        for sigma in enumerate_sn(k):
            assert count_small_pattern(sigma, pi) == count_pattern_bruteforce(sigma, pi)


def test_extremes():
    n = 30
    inc = list(range(1, n + 1))
    assert count_six_fast(inc)[parse_permutation("123")] == comb(n, 3)
    assert rho_star_statistic(inc) == 1
    assert rho_star_statistic(inc[::-1]) == 1


def test_short_input():
    with pytest.raises(PermutationError):
        rho_star_statistic([2, 1, 3])


def test_ranks():
    assert ranks_to_permutation([0.3, 0.1, 0.2], [5.0, 7.0, 6.0]) == (3, 2, 1)
    assert ranks_to_permutation([0.3, 0.1, 0.2], [5.0, 6.0, 7.0]) == (2, 3, 1)
    with pytest.raises(TiesPresent):
        ranks_to_permutation([1, 1, 2], [1, 2, 3])
    a = ranks_to_permutation([1, 1, 2, 3], [4, 3, 2, 1], break_ties=True, seed=3)
    b = ranks_to_permutation([1, 1, 2, 3], [4, 3, 2, 1], break_ties=True, seed=3)
    assert a == b and sorted(a) == [1, 2, 3, 4]


def test_comonotone_data_is_detected():
    xs = list(range(100))
    rep = independence_test(xs, [2 * x + 1 for x in xs], shuffles=200, seed=1)
    assert rep.p_value == pytest.approx(1 / 201)
    assert rep.statistic == "1"


def test_independent_data_p_value_is_not_tiny():
    rng = np.random.default_rng(11)
    xs, ys = rng.random(80).tolist(), rng.random(80).tolist()
    rep = independence_test(xs, ys, shuffles=200, seed=2)
    assert rep.p_value > 0.01
    assert Fraction(rep.statistic) == rho_star_statistic(ranks_to_permutation(xs, ys))


def test_seeded_reproducibility():
    rng = np.random.default_rng(5)
    xs, ys = rng.random(40).tolist(), rng.random(40).tolist()
    assert independence_test(xs, ys, shuffles=150, seed=9) == independence_test(xs, ys, shuffles=150, seed=9)


def test_test_arguments():
    with pytest.raises(ValueError):
        independence_test([1, 2, 3, 4, 5], [5, 4, 3, 2, 1], shuffles=10)
    with pytest.raises(ValueError):
        independence_test([1, 2, 3], [1, 2, 3])


def test_read_samples():
    xs, ys = read_samples(["x,y", "1,2", "", "3.5,4"])
    assert xs == [1.0, 3.5] and ys == [2.0, 4.0]
    with pytest.raises(ValueError):
        read_samples(["1,2", "a,b"])
    with pytest.raises(ValueError):
        read_samples(["1"])
