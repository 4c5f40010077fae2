from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rhostar.linalg import (
    NotSymmetric,
    RationalMatrix,
    determinant,
    identity,
    inertia,
    leading_minors,
    nullspace,
    rref,
    symmetric_eigenvalues,
)

small = st.integers(-6, 6)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def test_matrix_basics():
    a = RationalMatrix([[1, 2], [3, 4]])
    assert a.T == RationalMatrix([[1, 3], [2, 4]])
    assert a @ identity(2) == a
    assert (a * Fraction(1, 2))[1, 1] == 2
    assert (a - a) == RationalMatrix([[0, 0], [0, 0]])
    with pytest.raises(ValueError):
        RationalMatrix([[1, 2], [3]])


@given(square(4))
@settings(max_examples=60, deadline=None)
def test_determinant_matches_numpy(rows):
    assert abs(float(determinant(rows)) - np.linalg.det(np.array(rows, dtype=float))) < 1e-6


@given(st.lists(st.lists(small, min_size=5, max_size=5), min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_nullspace_vectors_are_killed(rows):
    basis = nullspace(rows, 5)
    _, pivots = rref(rows)
    assert len(basis) == 5 - len(pivots)
    for v in basis:
        for r in rows:
            assert sum(Fraction(a) * b for a, b in zip(r, v)) == 0


def test_sylvester_and_inertia():
    m = RationalMatrix([[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
    assert leading_minors(m) == [2, 3, 4]
    assert inertia(m) == (3, 0, 0)
    assert inertia(m * -1) == (0, 3, 0)
    assert inertia(RationalMatrix([[1, 1], [1, 1]])) == (1, 0, 1)
    # zero leading minor but indefinite: inertia must not rely on minors
    assert inertia(RationalMatrix([[0, 1], [1, 0]])) == (1, 1, 0)


@given(square(4))
@settings(max_examples=60, deadline=None)
def test_inertia_matches_float_eigenvalues(rows):
    m = RationalMatrix(rows)
    s = m + m.T
    pos, neg, zero = inertia(s)
    ev = np.linalg.eigvalsh(s.to_numpy())
    assert pos == int(np.sum(ev > 1e-9))
    assert neg == int(np.sum(ev < -1e-9))
    assert pos + neg + zero == 4


def test_non_symmetric_rejected():
    m = RationalMatrix([[1, 2], [0, 1]])
    with pytest.raises(NotSymmetric):
        inertia(m)
    with pytest.raises(NotSymmetric):
        symmetric_eigenvalues(m)
