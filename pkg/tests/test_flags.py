from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from rhostar.flags import (
    RootError,
    RootedSum,
    apply_rooted_symmetry,
    enumerate_rooted,
    flag_product,
    induced_rooted,
    parse_rooted,
    quarter_turn,
    root_type,
    unroot,
)
from rhostar.perms import QUARTER_TURN, enumerate_sn, formal_density, parse_permutation


def test_parse_and_root_type():
    rp = parse_rooted("1324:r=2,4")
    assert rp == parse_rooted("1324", [4, 2])
    assert root_type(rp) == (1, 2)
    assert str(rp) == "1324:r=2,4"
    with pytest.raises(RootError):
        parse_rooted("123", [4])
    with pytest.raises(RootError):
        parse_rooted("123", [1, 1])


def test_enumerate_rooted_counts():
    # each of the C(n,2) root pairs of each permutation has type 12 or 21
    t12 = enumerate_rooted(parse_permutation("12"), 4)
    t21 = enumerate_rooted(parse_permutation("21"), 4)
    assert len(t12) + len(t21) == 24 * 6
    assert len(t12) == len(t21)


def test_mixed_root_types_rejected():
    with pytest.raises(RootError):
        RootedSum([(1, parse_rooted("12:r=1,2")), (1, parse_rooted("21:r=1,2"))])


def test_product_by_hand():
    a = parse_rooted("12:r=1")
    prod = flag_product(a, a)
    # both free points lie above the root and to its right
    assert prod[parse_rooted("123:r=1")] == 1
    assert prod[parse_rooted("132:r=1")] == 1
    assert prod[parse_rooted("213:r=2")] == 0
    assert sum(c for _, c in prod.items()) == 2


def test_product_is_commutative_and_bilinear():
    a = RootedSum([(1, parse_rooted("132:r=1,2")), (-2, parse_rooted("123:r=1,3"))])
    b = RootedSum([(3, parse_rooted("1243:r=1,2"))])
    assert flag_product(a, b) == flag_product(b, a)
    assert flag_product(a * 2, b) == flag_product(a, b) * 2


def _split_oracle(a, b, pi):
    """Average over root sets Q and disjoint extension sets of the indicator that a and b are induced."""
    n = len(pi)
    t = len(a.roots)
    e1, e2 = a.order - t, b.order - t
    hits = total = 0
    for q in itertools.combinations(range(1, n + 1), t):
        rest = [i for i in range(1, n + 1) if i not in q]
        for s1 in itertools.combinations(rest, e1):
            others = [i for i in rest if i not in s1]
            for s2 in itertools.combinations(others, e2):
                total += 1
                left = induced_rooted(pi, tuple(sorted(q + s1)), q)
                right = induced_rooted(pi, tuple(sorted(q + s2)), q)
                hits += left == a and right == b
    return Fraction(hits, total)


@pytest.mark.parametrize("a,b", [("12:r=1", "21:r=2"), ("132:r=1,2", "213:r=2,3"), ("231:r=1", "12:r=2")])
def test_product_matches_split_oracle(a, b):
    ra, rb = parse_rooted(a), parse_rooted(b)
    if root_type(ra) != root_type(rb):
        pytest.skip("different root types")
    prod = unroot(flag_product(ra, rb))
    for pi in enumerate_sn(5):
        assert formal_density(prod, pi) == _split_oracle(ra, rb, pi)


def test_unroot_factor():
    rp = parse_rooted("2413:r=1,3")
    assert unroot(rp)[parse_permutation("2413")] == Fraction(1, 6)


def test_quarter_turn_order_four():
    rs = RootedSum([(1, parse_rooted("1324:r=2,4")), (-1, parse_rooted("2143:r=1,3"))])
    out = rs
    for _ in range(4):
        out = quarter_turn(out)
    assert out == rs
    assert quarter_turn(rs) != rs
    # a quarter turn swaps root types 12 and 21
    assert root_type(apply_rooted_symmetry(QUARTER_TURN, parse_rooted("12:r=1,2"))) == (2, 1)
