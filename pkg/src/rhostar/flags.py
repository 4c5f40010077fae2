"""Rooted permutations, unrooting, and the exact flag product.

Root sets are positions (the domain side of the permutation).
"""
from __future__ import annotations

import itertools
import json
import threading
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Mapping, NamedTuple

from .perms import (
    QUARTER_TURN,
    FormalSum,
    Permutation,
    PermutationError,
    Symmetry,
    _frac_str,
    _sn,
    parse_permutation,
    standardize,
    transform_points,
)

__all__ = [
    "RootError",
    "RootedPermutation",
    "RootedSum",
    "parse_rooted",
    "root_type",
    "enumerate_rooted",
    "unroot",
    "flag_product",
    "quarter_turn",
    "apply_rooted_symmetry",
    "induced_rooted",
]

MAX_ROOTED = 7


class RootError(PermutationError):
    pass


class RootedPermutation(NamedTuple):
    base: Permutation
    roots: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.base)

    @property
    def root_type(self) -> Permutation:
        return root_type(self)

    def __str__(self) -> str:
        return f"{self.base}:r={','.join(map(str, self.roots))}"


def _make_rooted(base: Permutation, roots: Iterable[int]) -> RootedPermutation:
    roots = tuple(sorted(set(int(r) for r in roots)))
    if not roots:
        raise RootError("root set must be non-empty")
    n = len(base)
    for r in roots:
        if not 1 <= r <= n:
            raise RootError(f"root position {r} out of range 1..{n}")
    return RootedPermutation(base, roots)


def parse_rooted(word: str, roots: Iterable[int] | None = None) -> RootedPermutation:
    """Parse ``("1324", [2, 4])`` or the text form ``"1324:r=2,4"``."""
    if roots is None:
        word, sep, rest = word.partition(":")
        if not sep or not rest.startswith("r="):
            raise RootError(f"expected 'word:r=p1,p2', got {word!r}")
        roots = [int(p) for p in rest[2:].split(",") if p.strip()]
    roots = list(roots)
    if len(set(roots)) != len(roots):
        raise RootError("root positions must be distinct")
    return _make_rooted(parse_permutation(word), roots)


def root_type(rp: RootedPermutation) -> Permutation:
    return standardize(rp.base[r - 1] for r in rp.roots)


def enumerate_rooted(tau: Permutation, n: int) -> list[RootedPermutation]:
    """All tau-rooted permutations of order ``n``, ordered by (base, roots)."""
    if not len(tau) <= n <= MAX_ROOTED:
        raise RootError(f"n must satisfy |tau| <= n <= {MAX_ROOTED}")
    return list(_rooted_table(tuple(tau), n))


@lru_cache(maxsize=None)
def _rooted_table(tau: tuple[int, ...], n: int) -> tuple[RootedPermutation, ...]:
    t = len(tau)
    out = []
    for pi in _sn(n):
        for idx in itertools.combinations(range(1, n + 1), t):
            if tuple(standardize(pi[i - 1] for i in idx)) == tau:
                out.append(RootedPermutation(pi, idx))
    return tuple(out)


class RootedSum:
    """Rational combination of rooted permutations sharing one root type."""

    __slots__ = ("_terms", "tau")

    def __init__(self, terms: Mapping[RootedPermutation, object] | Iterable[tuple[object, RootedPermutation]] = ()):
        acc: dict[RootedPermutation, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else ((p, c) for c, p in terms)
        tau = None
        for rp, coeff in items:
            t = root_type(rp)
            if tau is None:
                tau = t
            elif t != tau:
                raise RootError(f"mixed root types {tau} and {t}")
            acc[rp] = acc.get(rp, Fraction(0)) + Fraction(coeff)
        self._terms = {p: c for p, c in sorted(acc.items()) if c != 0}
        self.tau = tau if self._terms else None

    @classmethod
    def single(cls, rp: RootedPermutation, coeff: object = 1) -> "RootedSum":
        return cls({rp: coeff})

    def items(self):
        return self._terms.items()

    @property
    def terms(self) -> dict[RootedPermutation, Fraction]:
        return dict(self._terms)

    def __iter__(self) -> Iterator[RootedPermutation]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __getitem__(self, rp: RootedPermutation) -> Fraction:
        return self._terms.get(rp, Fraction(0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RootedSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "RootedSum") -> "RootedSum":
        out = dict(self._terms)
        for p, c in other._terms.items():
            out[p] = out.get(p, Fraction(0)) + c
        return RootedSum(out)

    def __neg__(self) -> "RootedSum":
        return RootedSum({p: -c for p, c in self._terms.items()})

    def __sub__(self, other: "RootedSum") -> "RootedSum":
        return self + (-other)

    def __mul__(self, scalar: object) -> "RootedSum":
        s = Fraction(scalar)
        return RootedSum({p: c * s for p, c in self._terms.items()})

    __rmul__ = __mul__

    def to_json(self) -> list[dict[str, object]]:
        return [
            {"coeff": _frac_str(c), "perm": str(rp.base), "roots": list(rp.roots)}
            for rp, c in self._terms.items()
        ]

    @classmethod
    def from_json(cls, data: str | list) -> "RootedSum":
        if isinstance(data, str):
            data = json.loads(data)
        return cls({parse_rooted(t["perm"], t["roots"]): Fraction(t["coeff"]) for t in data})

    def __repr__(self) -> str:
        body = " ".join(f"{'+' if c > 0 else '-'}{abs(c)}*{rp}" for rp, c in self._terms.items())
        return f"RootedSum({body or '0'})"


def unroot(rs: RootedSum | RootedPermutation) -> FormalSum:
    """Map each ``(pi, R)`` of order ``n`` to ``C(n, |R|)^-1 pi``, linearly."""
    if isinstance(rs, RootedPermutation):
        rs = RootedSum.single(rs)
    out: dict[Permutation, Fraction] = {}
    for rp, c in rs.items():
        out[rp.base] = out.get(rp.base, Fraction(0)) + c / comb(rp.order, len(rp.roots))
    return FormalSum(out)


def induced_rooted(base: tuple[int, ...], points: tuple[int, ...], roots: tuple[int, ...]) -> RootedPermutation:
    """Rooted pattern induced on the sorted position set ``points`` with marked ``roots``."""
    pat = standardize(base[i - 1] for i in points)
    rset = set(roots)
    return RootedPermutation(pat, tuple(j for j, p in enumerate(points, 1) if p in rset))


@lru_cache(maxsize=None)
def _split_table(tau: tuple[int, ...], n1: int, n2: int):
    """For every (sigma, Q) in S_m^tau, the rooted patterns seen by each partition.

    Returns ``(rows, total)`` where ``rows`` is a tuple of
    ``((sigma, Q), ((left, right), ...))`` and ``total`` the partition count.
    """
    t = len(tau)
    m = n1 + n2 - t
    rows = []
    for rp in _rooted_table(tau, m):
        base, q = tuple(rp.base), rp.roots
        free = [i for i in range(1, m + 1) if i not in q]
        splits = []
        for part in itertools.combinations(free, n1 - t):
            other = tuple(i for i in free if i not in part)
            left = induced_rooted(base, tuple(sorted(part + q)), q)
            right = induced_rooted(base, tuple(sorted(other + q)), q)
            splits.append((left, right))
        rows.append((rp, tuple(splits)))
    return tuple(rows), comb(m - t, n1 - t)


_product_lock = threading.Lock()
_product_cache: dict[tuple[RootedPermutation, RootedPermutation], RootedSum] = {}


def _as_sum(x: RootedSum | RootedPermutation) -> RootedSum:
    return RootedSum.single(x) if isinstance(x, RootedPermutation) else x


def _orders(rs: RootedSum) -> set[int]:
    return {rp.order for rp in rs}


def flag_product(a: RootedSum | RootedPermutation, b: RootedSum | RootedPermutation) -> RootedSum:
    """Exact flag product, extended bilinearly to rooted sums.

    Coefficients are obtained by enumerating every partition of the non-root
    points, never by sampling.
    """
    if isinstance(a, RootedPermutation) and isinstance(b, RootedPermutation):
        key = (a, b) if a <= b else (b, a)
        cached = _product_cache.get(key)
        if cached is not None:
            return cached
        result = _product_sums(RootedSum.single(key[0]), RootedSum.single(key[1]))
        with _product_lock:
            _product_cache.setdefault(key, result)
        return result
    return _product_sums(_as_sum(a), _as_sum(b))


def _product_sums(a: RootedSum, b: RootedSum) -> RootedSum:
    if not len(a) or not len(b):
        return RootedSum()
    if a.tau != b.tau:
        raise RootError(f"root types differ: {a.tau} vs {b.tau}")
    out: dict[RootedPermutation, Fraction] = {}
    for n1 in sorted(_orders(a)):
        a_part = {rp: c for rp, c in a.items() if rp.order == n1}
        for n2 in sorted(_orders(b)):
            b_part = {rp: c for rp, c in b.items() if rp.order == n2}
            rows, total = _split_table(tuple(a.tau), n1, n2)
            for target, splits in rows:
                acc = Fraction(0)
                for left, right in splits:
                    ca = a_part.get(left)
                    if ca is None:
                        continue
                    cb = b_part.get(right)
                    if cb is None:
                        continue
                    acc += ca * cb
                if acc:
                    out[target] = out.get(target, Fraction(0)) + acc / total
    return RootedSum(out)


def apply_rooted_symmetry(s: Symmetry, rp: RootedPermutation) -> RootedPermutation:
    n = rp.order
    rset = set(rp.roots)
    pts = transform_points(s, n, [(x, y) for x, y in enumerate(rp.base, 1)])
    word = [0] * n
    new_roots = []
    for (x0, _), (x, y) in zip(enumerate(rp.base, 1), pts):
        word[x - 1] = y
        if x0 in rset:
            new_roots.append(x)
    return RootedPermutation(Permutation._trusted(tuple(word)), tuple(sorted(new_roots)))


def quarter_turn(rs: RootedSum | RootedPermutation) -> RootedSum:
    """Rotate every term's permutation matrix by a quarter turn, carrying the roots."""
    rs = _as_sum(rs)
    return RootedSum({apply_rooted_symmetry(QUARTER_TURN, rp): c for rp, c in rs.items()})
