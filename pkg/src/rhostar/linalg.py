"""Dense exact-rational matrices and the handful of linear algebra routines we need."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "RationalMatrix",
    "NotSymmetric",
    "ones",
    "zeros",
    "identity",
    "determinant",
    "leading_minors",
    "nullspace",
    "rref",
    "inertia",
    "symmetric_eigenvalues",
]


class NotSymmetric(ValueError):
    pass


class RationalMatrix:
    """Rectangular matrix of :class:`Fraction` entries (row-major, immutable by convention)."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable[object]]):
        rows = [tuple(Fraction(v) for v in row) for row in data]
        if not rows or not rows[0]:
            raise ValueError("matrix must be non-empty")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix")
        self._data = tuple(rows)
        self.rows = len(rows)
        self.cols = width

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._data[i]

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._data]

    def entries(self) -> Iterable[Fraction]:
        for r in self._data:
            yield from r

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self._data == other._data

    def __hash__(self) -> int:
        return hash(self._data)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._same_shape(other)
        return RationalMatrix([a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data))

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._same_shape(other)
        return RationalMatrix([a - b for a, b in zip(r, s)] for r, s in zip(self._data, other._data))

    def __mul__(self, scalar: object) -> "RationalMatrix":
        s = Fraction(scalar)
        return RationalMatrix([a * s for a in r] for r in self._data)

    __rmul__ = __mul__

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other._data))
        return RationalMatrix([sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self._data)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(zip(*self._data))

    @property
    def T(self) -> "RationalMatrix":
        return self.transpose()

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self._data[i][j] == self._data[j][i] for i in range(self.rows) for j in range(i)
        )

    def is_constant(self) -> bool:
        first = self._data[0][0]
        return all(v == first for v in self.entries())

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self._data])

    def _same_shape(self, other: "RationalMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(v) for v in r) for r in self._data)
        return f"RationalMatrix([{body}])"


def ones(rows: int, cols: int | None = None) -> RationalMatrix:
    return RationalMatrix([[1] * (cols or rows) for _ in range(rows)])


def zeros(rows: int, cols: int | None = None) -> RationalMatrix:
    return RationalMatrix([[0] * (cols or rows) for _ in range(rows)])


def identity(n: int) -> RationalMatrix:
    return RationalMatrix([[int(i == j) for j in range(n)] for i in range(n)])


def determinant(rows: Sequence[Sequence[object]]) -> Fraction:
    """Exact determinant by fraction-preserving Gaussian elimination."""
    a = [[Fraction(v) for v in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        p = a[c][c]
        det *= p
        for r in range(c + 1, n):
            f = a[r][c]
            if f:
                f /= p
                row_r, row_c = a[r], a[c]
                for k in range(c, n):
                    row_r[k] -= f * row_c[k]
    return det


def leading_minors(m: RationalMatrix) -> list[Fraction]:
    data = m.tolist()
    return [determinant([row[:k] for row in data[:k]]) for k in range(1, m.rows + 1)]


def rref(rows: Sequence[Sequence[object]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [[Fraction(v) for v in r] for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [v / p for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [v - f * w for v, w in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def nullspace(rows: Sequence[Sequence[object]], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right nullspace, one vector per free column (RREF order)."""
    if ncols is None:
        ncols = len(rows[0])
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def inertia(m: RationalMatrix) -> tuple[int, int, int]:
    """Exact (positive, negative, zero) eigenvalue counts via congruence diagonalisation."""
    if not m.is_symmetric():
        raise NotSymmetric("inertia needs a symmetric matrix")
    a = m.tolist()
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # congruence e_i <- e_i + e_j makes the (i, i) entry 2 a_ij
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        p = a[piv][piv]
        if p > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for r in active:
            f = a[r][piv]
            if f:
                f /= p
                for c in active:
                    a[r][c] -= f * a[piv][c]
        for r in active:
            a[r][piv] = a[piv][r] = Fraction(0)
    return pos, neg, n - pos - neg


def symmetric_eigenvalues(m: RationalMatrix) -> list[float]:
    """Float eigenvalues of a symmetric matrix, descending."""
    if not m.is_symmetric():
        raise NotSymmetric("eigenvalues requested for a non-symmetric matrix")
    vals = np.linalg.eigvalsh(m.to_numpy())
    return sorted((float(v) for v in vals), reverse=True)
