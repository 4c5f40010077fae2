"""Permutations, pattern counts and densities, formal sums, and the dihedral action.

A permutation is stored as its one-line word ``(pi(1), ..., pi(n))``.  All
densities are exact :class:`fractions.Fraction` values.
"""
from __future__ import annotations

import itertools
import json
import re
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Mapping, NamedTuple

__all__ = [
    "PermutationError",
    "DuplicateValue",
    "Permutation",
    "parse_permutation",
    "standardize",
    "enumerate_sn",
    "count_pattern",
    "count_pattern_bruteforce",
    "density",
    "FormalSum",
    "formal_density",
    "Symmetry",
    "SYMMETRIES",
    "IDENTITY",
    "REVERSE",
    "COMPLEMENT",
    "INVERSE",
    "QUARTER_TURN",
    "apply_symmetry",
    "transform_points",
    "project_up",
    "RHO_STAR",
    "NU",
    "XI",
]

MAX_SN = 10
MAX_PROJECT = 8


class PermutationError(ValueError):
    pass


class DuplicateValue(PermutationError):
    pass


class Permutation(tuple):
    """A bijection on ``[n]`` given by its one-line word.

    Subclasses :class:`tuple`, so comparison is lexicographic on words and
    instances are hashable.
    """

    __slots__ = ()

    def __new__(cls, word: Iterable[int]) -> "Permutation":
        word = tuple(int(v) for v in word)
        n = len(word)
        if n == 0:
            raise PermutationError("a permutation must have order at least 1")
        seen = set()
        for v in word:
            if v < 1 or v > n:
                raise PermutationError(f"value {v} out of range 1..{n}")
            if v in seen:
                raise DuplicateValue(f"value {v} repeated")
            seen.add(v)
        return super().__new__(cls, word)

    @classmethod
    def _trusted(cls, word: tuple[int, ...]) -> "Permutation":
        # skips validation; callers guarantee ``word`` is a permutation
        return super().__new__(cls, word)

    @property
    def order(self) -> int:
        return len(self)

    @property
    def word(self) -> tuple[int, ...]:
        return tuple(self)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self)
        for i, v in enumerate(self, 1):
            inv[v - 1] = i
        return Permutation._trusted(tuple(inv))

    def reverse(self) -> "Permutation":
        return Permutation._trusted(tuple(reversed(self)))

    def complement(self) -> "Permutation":
        n = len(self)
        return Permutation._trusted(tuple(n + 1 - v for v in self))

    def __str__(self) -> str:
        if len(self) <= 9:
            return "".join(map(str, self))
        return ",".join(map(str, self))

    def __repr__(self) -> str:
        return f"Permutation({str(self)!r})"


def parse_permutation(text: str) -> Permutation:
    """Parse ``"2143"`` or ``"10,2,3,..."`` into a :class:`Permutation`."""
    text = text.strip()
    if not text:
        raise PermutationError("empty permutation")
    if "," in text:
        parts = [p.strip() for p in text.split(",")]
        if any(not p.isdigit() for p in parts):
            raise PermutationError(f"malformed permutation {text!r}")
        return Permutation(int(p) for p in parts)
    if not text.isdigit():
        raise PermutationError(f"malformed permutation {text!r}")
    return Permutation(int(c) for c in text)


def standardize(values: Iterable[int]) -> Permutation:
    """The pattern (relative order) of a sequence of distinct numbers."""
    values = list(values)
    ranks = {v: r for r, v in enumerate(sorted(values), 1)}
    return Permutation._trusted(tuple(ranks[v] for v in values))


@lru_cache(maxsize=None)
def _sn(n: int) -> tuple[Permutation, ...]:
    return tuple(Permutation._trusted(p) for p in itertools.permutations(range(1, n + 1)))


def enumerate_sn(n: int) -> list[Permutation]:
    """All ``n!`` permutations of order ``n`` in lexicographic order."""
    if not 1 <= n <= MAX_SN:
        raise PermutationError(f"n must be in 1..{MAX_SN}, got {n}")
    return list(_sn(n))


def count_pattern_bruteforce(sigma: Permutation, pi: Permutation) -> int:
    k = len(sigma)
    if k > len(pi):
        return 0
    target = tuple(sigma)
    return sum(
        1
        for idx in itertools.combinations(range(len(pi)), k)
        if standardize(pi[i] for i in idx) == target
    )


_FAST_THRESHOLD = 20


def count_pattern(sigma: Permutation, pi: Permutation) -> int:
    """Number of copies of ``sigma`` in ``pi``."""
    k, n = len(sigma), len(pi)
    if k > n:
        return 0
    if k == 1:
        return n
    if n > _FAST_THRESHOLD and k <= 4:
        from .statistic import count_small_pattern

        return count_small_pattern(sigma, pi)
    return _count_cached(tuple(sigma), tuple(pi))


@lru_cache(maxsize=1 << 16)
def _count_cached(sigma: tuple[int, ...], pi: tuple[int, ...]) -> int:
    return count_pattern_bruteforce(sigma, pi)


def density(sigma: Permutation, pi: Permutation) -> Fraction:
    k, n = len(sigma), len(pi)
    if k > n:
        return Fraction(0)
    return Fraction(count_pattern(sigma, pi), comb(n, k))


@lru_cache(maxsize=None)
def _pattern_profile(pi: tuple[int, ...], k: int) -> dict[tuple[int, ...], int]:
    """Counts of every k-pattern occurring in ``pi`` (one pass over subsets)."""
    counts: dict[tuple[int, ...], int] = {}
    for idx in itertools.combinations(range(len(pi)), k):
        pat = tuple(standardize(pi[i] for i in idx))
        counts[pat] = counts.get(pat, 0) + 1
    return counts


class FormalSum:
    """A finite rational linear combination of permutations.

    Terms with zero coefficient are dropped on construction.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Permutation, object] | Iterable[tuple[object, Permutation]] = ()):
        acc: dict[Permutation, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else ((p, c) for c, p in terms)
        for perm, coeff in items:
            if not isinstance(perm, Permutation):
                perm = parse_permutation(perm) if isinstance(perm, str) else Permutation(perm)
            acc[perm] = acc.get(perm, Fraction(0)) + Fraction(coeff)
        self._terms = {p: c for p, c in sorted(acc.items()) if c != 0}

    @classmethod
    def single(cls, perm: Permutation | str, coeff: object = 1) -> "FormalSum":
        return cls({perm: coeff})

    @property
    def terms(self) -> dict[Permutation, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __iter__(self) -> Iterator[Permutation]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __getitem__(self, perm: Permutation) -> Fraction:
        return self._terms.get(perm, Fraction(0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "FormalSum") -> "FormalSum":
        out = dict(self._terms)
        for p, c in other._terms.items():
            out[p] = out.get(p, Fraction(0)) + c
        return FormalSum(out)

    def __neg__(self) -> "FormalSum":
        return FormalSum({p: -c for p, c in self._terms.items()})

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def __mul__(self, scalar: object) -> "FormalSum":
        s = Fraction(scalar)
        return FormalSum({p: c * s for p, c in self._terms.items()})

    __rmul__ = __mul__

    def max_order(self) -> int:
        return max((len(p) for p in self._terms), default=0)

    def uniform_value(self) -> Fraction:
        """Value on the uniform permuton: sum of ``c / |sigma|!``."""
        from math import factorial

        return sum((c / factorial(len(p)) for p, c in self._terms.items()), Fraction(0))

    def map(self, fn) -> "FormalSum":
        return FormalSum({fn(p): c for p, c in self._terms.items()})

    def to_json(self) -> list[dict[str, str]]:
        return [{"coeff": _frac_str(c), "perm": str(p)} for p, c in self._terms.items()]

    @classmethod
    def from_json(cls, data: str | list) -> "FormalSum":
        if isinstance(data, str):
            data = json.loads(data)
        return cls({parse_permutation(t["perm"]): Fraction(t["coeff"]) for t in data})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for p, c in sorted(self._terms.items(), key=lambda t: (-len(t[0]), t[0])):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = str(p) if mag == 1 else f"{mag}({p})"
            parts.append(f"{sign} {body}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __repr__(self) -> str:
        return f"FormalSum({str(self)!r})"


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def formal_density(rho: FormalSum, pi: Permutation) -> Fraction:
    return sum((c * density(s, pi) for s, c in rho.items()), Fraction(0))


class Symmetry(NamedTuple):
    """An element of the dihedral group of the square acting on permutation matrices.

    Points ``(i, pi(i))`` are centred at the origin and multiplied by the
    signed permutation matrix ``((a, b), (c, d))``.
    """

    a: int
    b: int
    c: int
    d: int
    name: str = ""

    def __matmul__(self, other: "Symmetry") -> "Symmetry":
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        return _lookup(a, b, c, d)

    def key(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def inverse(self) -> "Symmetry":
        # orthogonal matrix: inverse is the transpose
        return _lookup(self.a, self.c, self.b, self.d)

    def __call__(self, pi: Permutation) -> Permutation:
        return apply_symmetry(self, pi)


IDENTITY = Symmetry(1, 0, 0, 1, "identity")
REVERSE = Symmetry(-1, 0, 0, 1, "reverse")
COMPLEMENT = Symmetry(1, 0, 0, -1, "complement")
INVERSE = Symmetry(0, 1, 1, 0, "inverse")
# (x, y) -> (n + 1 - y, x)
QUARTER_TURN = Symmetry(0, -1, 1, 0, "quarter_turn")
HALF_TURN = Symmetry(-1, 0, 0, -1, "half_turn")
THREE_QUARTER_TURN = Symmetry(0, 1, -1, 0, "three_quarter_turn")
ANTI_INVERSE = Symmetry(0, -1, -1, 0, "anti_inverse")

SYMMETRIES: tuple[Symmetry, ...] = (
    IDENTITY,
    REVERSE,
    COMPLEMENT,
    INVERSE,
    QUARTER_TURN,
    HALF_TURN,
    THREE_QUARTER_TURN,
    ANTI_INVERSE,
)
_BY_KEY = {s.key(): s for s in SYMMETRIES}


def _lookup(a: int, b: int, c: int, d: int) -> Symmetry:
    return _BY_KEY[(a, b, c, d)]


def transform_points(s: Symmetry, n: int, points: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Image of grid points ``(x, y)`` in ``[n]^2`` under ``s``."""
    out = []
    for x, y in points:
        u, v = 2 * x - n - 1, 2 * y - n - 1
        u2, v2 = s.a * u + s.b * v, s.c * u + s.d * v
        out.append(((u2 + n + 1) // 2, (v2 + n + 1) // 2))
    return out


def apply_symmetry(s: Symmetry, pi: Permutation) -> Permutation:
    n = len(pi)
    pts = transform_points(s, n, enumerate(pi, 1))
    word = [0] * n
    for x, y in pts:
        word[x - 1] = y
    return Permutation._trusted(tuple(word))


def project_up(rho: FormalSum, n: int) -> FormalSum:
    """The degree-``n`` representative ``sum_{pi in S_n} d(rho, pi) pi``."""
    if n < rho.max_order():
        raise PermutationError(f"n={n} is smaller than the largest order in rho")
    if n > MAX_PROJECT:
        raise PermutationError(f"n={n} exceeds the supported maximum {MAX_PROJECT}")
    by_order: dict[int, list[tuple[tuple[int, ...], Fraction]]] = {}
    for s, c in rho.items():
        by_order.setdefault(len(s), []).append((tuple(s), c))
    out: dict[Permutation, Fraction] = {}
    for pi in _sn(n):
        total = Fraction(0)
        for k, terms in by_order.items():
            profile = _pattern_profile(tuple(pi), k)
            denom = comb(n, k)
            for s, c in terms:
                cnt = profile.get(s, 0)
                if cnt:
                    total += c * Fraction(cnt, denom)
        if total:
            out[pi] = total
    return FormalSum(out)


_COEFF = r"\d+(?:/\d+)?"
_TERM = re.compile(
    r"\s*([+-])?\s*(?:(" + _COEFF + r")\s*\*\s*(\d[\d,]*)|(" + _COEFF + r")?\s*\(([\d,\s]+)\)|(\d[\d,]*))\s*"
)


def parse_formal_sum(text: str) -> FormalSum:
    """Parse expressions such as ``"3(1234) + 3(4321) - 4(123) + 3(12)"`` or ``"1/2*2413 - 21"``.

    A bare word with no parentheses takes coefficient one, so ``"2(12)"`` and
    ``"2*12"`` both mean two times 12.
    """
    text = text.strip()
    if not text:
        raise PermutationError("empty expression")
    terms = []
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise PermutationError(f"cannot parse expression near {text[pos:]!r}")
        if terms and not m.group(1):
            raise PermutationError(f"missing sign before {text[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        raw = m.group(2) or m.group(4)
        coeff = Fraction(raw) if raw else Fraction(1)
        word = (m.group(3) or m.group(5) or m.group(6)).replace(" ", "")
        terms.append((sign * coeff, parse_permutation(word)))
        pos = m.end()
    return FormalSum(terms)


def _fs(text: str) -> FormalSum:
    terms = []
    for tok in text.split():
        coeff, _, word = tok.partition("*")
        terms.append((Fraction(coeff), parse_permutation(word)))
    return FormalSum(terms)


RHO_STAR = _fs("1*123 1*321 1*2143 1*3412 1/2*2413 1/2*3142")
NU = _fs("1*12 1*21")
XI = _fs("2*123 -2*321 -3*12")
