"""Fast pattern counts for rho*, the rank construction, and the independence test."""
from __future__ import annotations

import csv
import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .perms import SYMMETRIES, Permutation, PermutationError, apply_symmetry, count_pattern_bruteforce, parse_permutation

__all__ = [
    "TiesPresent",
    "SIX_PATTERNS",
    "ranks_to_permutation",
    "count_six_fast",
    "count_six_bruteforce",
    "count_small_pattern",
    "rho_star_statistic",
    "TestReport",
    "independence_test",
    "read_samples",
]

NULL_VALUE = Fraction(11, 24)
SIX_PATTERNS = tuple(parse_permutation(w) for w in ("123", "321", "2143", "3412", "2413", "3142"))
MIN_SHUFFLES = 100


class TiesPresent(ValueError):
    pass


def ranks_to_permutation(
    xs: Sequence[float], ys: Sequence[float], break_ties: bool = False, seed: int | None = None
) -> Permutation:
    """Sort the pairs by x and replace each y by its rank."""
    if len(xs) != len(ys):
        raise ValueError("x and y must have the same length")
    if not xs:
        raise ValueError("empty sample")
    rng = random.Random(seed)
    if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
        if not break_ties:
            raise TiesPresent("tied x or y values; pass break_ties=True for random tie-breaking")
    # random keys only matter among tied values
    kx = [rng.random() for _ in xs]
    ky = [rng.random() for _ in ys]
    order = sorted(range(len(xs)), key=lambda i: (xs[i], kx[i]))
    yrank = {i: r for r, i in enumerate(sorted(range(len(ys)), key=lambda i: (ys[i], ky[i])), 1)}
    return Permutation._trusted(tuple(yrank[i] for i in order))


def _prefix_table(pi: Sequence[int]) -> np.ndarray:
    """T[i, v] = #{p < i : pi_p <= v} for 0 <= i, v <= n."""
    n = len(pi)
    t = np.zeros((n + 1, n + 1), dtype=np.int32)
    onehot = np.zeros((n, n + 1), dtype=np.int32)
    onehot[np.arange(n), np.asarray(pi)] = 1
    t[1:] = np.cumsum(np.cumsum(onehot, axis=0), axis=1)
    return t


class _Counter:
    """Rectangle counts over all position pairs (a, c) with a < c, vectorised."""

    def __init__(self, pi: Sequence[int]):
        self.n = n = len(pi)
        self.v = np.asarray(pi, dtype=np.int64)
        self.T = _prefix_table(pi)
        self.A = np.arange(n)[:, None]
        self.C = np.arange(n)[None, :]
        self.upper = self.A < self.C

    def rect(self, i0, i1, v0, v1):
        """#{i0 <= p < i1 : v0 < pi_p <= v1}; arguments broadcast."""
        T = self.T
        v0 = np.clip(v0, 0, self.n)
        v1 = np.clip(v1, 0, self.n)
        out = T[i1, v1] - T[i0, v1] - T[i1, v0] + T[i0, v0]
        return np.where(v1 > v0, out, 0)

    def between(self, lo, hi):
        """Count of b with a < b < c and value in (lo, hi], for every pair."""
        return self.rect(self.A + 1, np.maximum(self.C, self.A + 1), lo, hi)

    def after(self, lo, hi):
        """Count of d > c with value in (lo, hi]."""
        return self.rect(self.C + 1, self.n, lo, hi)


def _count_inversions(pi: Sequence[int]) -> int:
    n = len(pi)
    tree = [0] * (n + 1)
    inv = 0
    for seen, v in enumerate(pi):
        i, s = v, 0
        while i > 0:
            s += tree[i]
            i -= i & -i
        inv += seen - s
        i = v
        while i <= n:
            tree[i] += 1
            i += i & -i
    return inv


def _count_increasing(pi: Sequence[int], k: int) -> int:
    """Increasing subsequences of length k via k Fenwick sweeps."""
    n = len(pi)
    ways = [1] * n
    for _ in range(k - 1):
        tree = [0] * (n + 1)
        nxt = [0] * n
        for p, v in enumerate(pi):
            i, s = v - 1, 0
            while i > 0:
                s += tree[i]
                i -= i & -i
            nxt[p] = s
            i = v
            while i <= n:
                tree[i] += ways[p]
                i += i & -i
        ways = nxt
    return sum(ways)


def _count3(c: _Counter, sigma: tuple[int, ...]) -> int:
    s1, s2, s3 = sigma
    va, vc = c.v[:, None], c.v[None, :]
    lo, hi = np.minimum(va, vc), np.maximum(va, vc)
    mask = c.upper & ((va < vc) if s1 < s3 else (va > vc))
    if s2 == 1:
        mid = c.between(0, lo - 1)
    elif s2 == 3:
        mid = c.between(hi, c.n)
    else:
        mid = c.between(lo, hi - 1)
    return int(np.sum(np.where(mask, mid, 0), dtype=np.int64))


def _count_2143(c: _Counter) -> int:
    va, vc = c.v[:, None], c.v[None, :]
    mask = c.upper & (va < vc)
    prod = c.between(0, va - 1) * c.after(va, vc - 1)
    return int(np.sum(np.where(mask, prod, 0), dtype=np.int64))


def _count_3412(c: _Counter) -> int:
    va, vc = c.v[:, None], c.v[None, :]
    mask = c.upper & (vc < va)
    prod = c.between(va, c.n) * c.after(vc, va - 1)
    return int(np.sum(np.where(mask, prod, 0), dtype=np.int64))


def _count_2413(c: _Counter) -> int:
    # pairs (a, c) = positions of the 2 and the 1; b above a between them, d above a after c,
    # minus the configurations where d also sits above b (pattern 2314)
    va, vc = c.v[:, None], c.v[None, :]
    mask = c.upper & (vc < va)
    prod = c.between(va, c.n) * c.after(va, c.n)
    total = int(np.sum(np.where(mask, prod, 0), dtype=np.int64))
    # 2314: fix (b, c) with pi_c < pi_b; a before b with value in (pi_c, pi_b); d after c above pi_b
    vb = va
    before = c.rect(0, c.A, vc, vb - 1)
    above = c.after(vb, c.n)
    sub = int(np.sum(np.where(mask, before * above, 0), dtype=np.int64))
    return total - sub


def count_six_fast(pi: Sequence[int]) -> dict[Permutation, int]:
    """Exact counts of 123, 321, 2143, 3412, 2413, 3142 in quadratic time and memory."""
    pi = tuple(pi)
    n = len(pi)
    out = {p: 0 for p in SIX_PATTERNS}
    if n < 3:
        return out
    out[SIX_PATTERNS[0]] = _count_increasing(pi, 3)
    out[SIX_PATTERNS[1]] = _count_increasing(tuple(n + 1 - v for v in pi), 3)
    if n < 4:
        return out
    c = _Counter(pi)
    out[SIX_PATTERNS[2]] = _count_2143(c)
    out[SIX_PATTERNS[3]] = _count_3412(c)
    out[SIX_PATTERNS[4]] = _count_2413(c)
    out[SIX_PATTERNS[5]] = _count_2413(_Counter(pi[::-1]))
    return out


def count_six_bruteforce(pi: Sequence[int]) -> dict[Permutation, int]:
    p = Permutation(pi)
    return {s: count_pattern_bruteforce(s, p) for s in SIX_PATTERNS}


_FAST4 = {(2, 1, 4, 3): _count_2143, (3, 4, 1, 2): _count_3412, (2, 4, 1, 3): _count_2413}


def count_small_pattern(sigma: Sequence[int], pi: Sequence[int]) -> int:
    """Copies of a pattern of order at most 4 without subset enumeration where possible.

    Order-4 patterns outside the classes of 1234, 2143 and 2413 fall back to
    brute force.
    """
    sigma = tuple(sigma)
    pi = tuple(pi)
    k, n = len(sigma), len(pi)
    if k > n:
        return 0
    if k == 1:
        return n
    if k == 2:
        inv = _count_inversions(pi)
        return inv if sigma == (2, 1) else comb(n, 2) - inv
    if k == 3:
        if sigma == (1, 2, 3):
            return _count_increasing(pi, 3)
        if sigma == (3, 2, 1):
            return _count_increasing(tuple(n + 1 - v for v in pi), 3)
        return _count3(_Counter(pi), sigma)
    if k == 4:
        s = Permutation(sigma)
        p = Permutation(pi)
        for sym in SYMMETRIES:
            image = tuple(apply_symmetry(sym, s))
            if image == (1, 2, 3, 4):
                return _count_increasing(tuple(apply_symmetry(sym, p)), 4)
            if image in _FAST4:
                return _FAST4[image](_Counter(tuple(apply_symmetry(sym, p))))
    return count_pattern_bruteforce(Permutation(sigma), Permutation(pi))


def rho_star_statistic(pi: Sequence[int]) -> Fraction:
    """d(rho*, pi) from the six fast counts."""
    n = len(pi)
    if n < 4:
        raise PermutationError("the statistic needs a permutation of order at least 4")
    c = count_six_fast(pi)
    c123, c321, c2143, c3412, c2413, c3142 = (c[p] for p in SIX_PATTERNS)
    return Fraction(c123 + c321, comb(n, 3)) + Fraction(2 * (c2143 + c3412) + c2413 + c3142, 2 * comb(n, 4))


@dataclass(frozen=True)
class TestReport:
    n: int
    statistic: str
    statistic_float: float
    deviation: float
    p_value: float
    shuffles: int
    seed: int
    ties_broken: bool = False

    def to_json(self) -> dict[str, object]:
        return asdict(self)


def independence_test(
    xs: Sequence[float],
    ys: Sequence[float],
    shuffles: int = 2000,
    seed: int = 0,
    break_ties: bool = False,
) -> TestReport:
    """Two-sided permutation test on |d(rho*, pi_n) - 11/24|.

    The null distribution comes from seeded uniform shuffles of the y ranks.
    """
    if shuffles < MIN_SHUFFLES:
        raise ValueError(f"shuffles must be at least {MIN_SHUFFLES}")
    if len(xs) < 4:
        raise ValueError("need at least 4 observations")
    ties = len(set(xs)) != len(xs) or len(set(ys)) != len(ys)
    pi = ranks_to_permutation(xs, ys, break_ties=break_ties, seed=seed)
    stat = rho_star_statistic(pi)
    observed = abs(stat - NULL_VALUE)
    rng = np.random.default_rng(seed)
    base = np.asarray(pi)
    hits = 0
    for _ in range(shuffles):
        sample = rng.permutation(base)
        if abs(rho_star_statistic(sample.tolist()) - NULL_VALUE) >= observed:
            hits += 1
    return TestReport(
        n=len(pi),
        statistic=str(stat),
        statistic_float=float(stat),
        deviation=float(stat - NULL_VALUE),
        p_value=(1 + hits) / (shuffles + 1),
        shuffles=shuffles,
        seed=seed,
        ties_broken=ties and break_ties,
    )


def read_samples(lines: Iterable[str]) -> tuple[list[float], list[float]]:
    """Two-column CSV, with an optional header row."""
    xs: list[float] = []
    ys: list[float] = []
    for i, row in enumerate(csv.reader(lines)):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < 2:
            raise ValueError(f"line {i + 1}: expected two columns")
        try:
            x, y = float(row[0]), float(row[1])
        except ValueError:
            if i == 0:
                continue
            raise ValueError(f"line {i + 1}: not a number") from None
        xs.append(x)
        ys.append(y)
    return xs, ys
