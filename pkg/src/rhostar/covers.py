"""Fuzzy and cover matrices, repeated entries, and the constant-cover classification."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from math import comb, factorial, gcd
from typing import Iterable, Sequence

from .linalg import RationalMatrix, nullspace
from .perms import (
    SYMMETRIES,
    FormalSum,
    Permutation,
    Symmetry,
    _pattern_profile,
    _sn,
    apply_symmetry,
    parse_permutation,
)

__all__ = [
    "f_poly",
    "fuzzy_matrix",
    "fuzzy_matrix_sum",
    "cover_matrix",
    "decompose_fto_a",
    "zero_count",
    "repeat_count",
    "single_repeat_max",
    "pair_repeat_max",
    "pair_repeat_max_candidates",
    "repeats_lemma_holds",
    "profile_bounds",
    "enumerate_profiles",
    "ConstantCover",
    "solve_cover",
    "canonicalize_cover",
    "search_covers",
    "latin_covers",
    "SearchResult",
    "SearchBudgetExceeded",
    "FuzzyIdentityError",
]

MAX_FUZZY = 12
MAX_COVER = 7
DEFAULT_BUDGET = 10**8


class FuzzyIdentityError(AssertionError):
    """Raised when the cover/fuzzy constant-shift identity fails (an implementation bug)."""


class SearchBudgetExceeded(RuntimeError):
    pass


# -- fuzzy matrices -----------------------------------------------------------


def f_poly(k: int, j: int, n: int, x: int) -> int:
    """C(x-1, j-1) * C(n-x, k-j)."""
    if not (1 <= j <= k <= n and 1 <= x <= n):
        raise ValueError(f"need 1 <= j <= k <= n and 1 <= x <= n, got k={k} j={j} n={n} x={x}")
    return comb(x - 1, j - 1) * comb(n - x, k - j)


def _scale(k: int, n: int) -> Fraction:
    return Fraction(factorial(n - k), comb(n, k))


@lru_cache(maxsize=None)
def _fuzzy_int(sigma: tuple[int, ...], n: int) -> tuple[tuple[int, ...], ...]:
    """Integer part of the fuzzy matrix; the full matrix is this times ``(n-k)!/C(n,k)``."""
    k = len(sigma)
    rows = []
    for x in range(1, n + 1):
        fx = [comb(x - 1, j - 1) * comb(n - x, k - j) for j in range(1, k + 1)]
        rows.append(
            tuple(
                sum(fx[j] * comb(y - 1, sigma[j] - 1) * comb(n - y, k - sigma[j]) for j in range(k) if fx[j])
                for y in range(1, n + 1)
            )
        )
    return tuple(rows)


def fuzzy_matrix(sigma: Permutation, n: int) -> RationalMatrix:
    """F_sigma^n; rows are positions x, columns are values y."""
    k = len(sigma)
    if n < k:
        raise ValueError(f"n={n} is smaller than |sigma|={k}")
    if n > MAX_FUZZY:
        raise ValueError(f"n must be at most {MAX_FUZZY}")
    s = _scale(k, n)
    return RationalMatrix([[s * v for v in row] for row in _fuzzy_int(tuple(sigma), n)])


def fuzzy_matrix_sum(rho: FormalSum, n: int) -> RationalMatrix:
    acc = [[Fraction(0)] * n for _ in range(n)]
    for sigma, c in rho.items():
        f = fuzzy_matrix(sigma, n)
        for x in range(n):
            for y in range(n):
                acc[x][y] += c * f[x, y]
    return RationalMatrix(acc)


def cover_matrix(sigma: Permutation, n: int) -> RationalMatrix:
    """A_sigma^n = sum over pi in S_n of d(sigma, pi) A_pi."""
    k = len(sigma)
    if not k <= n <= MAX_COVER:
        raise ValueError(f"need |sigma| <= n <= {MAX_COVER}")
    acc = [[0] * n for _ in range(n)]
    key = tuple(sigma)
    for pi in _sn(n):
        cnt = _pattern_profile(tuple(pi), k).get(key, 0)
        if cnt:
            for x, y in enumerate(pi):
                acc[x][y - 1] += cnt
    denom = comb(n, k)
    return RationalMatrix([[Fraction(v, denom) for v in row] for row in acc])


def decompose_fto_a(sigma: Permutation, n: int) -> Fraction:
    """Check that A - F is the constant ((n-1)!/(k-1)!)(1/k - 1/n) and return it."""
    k = len(sigma)
    const = Fraction(factorial(n - 1), factorial(k - 1)) * (Fraction(1, k) - Fraction(1, n))
    diff = cover_matrix(sigma, n) - fuzzy_matrix(sigma, n)
    if any(v != const for v in diff.entries()):
        raise FuzzyIdentityError(f"A - F is not {const} J for sigma={sigma}, n={n}")
    return const


# -- repeated entries -----------------------------------------------------------


def _flat(m) -> list:
    if isinstance(m, RationalMatrix):
        return list(m.entries())
    return [v for row in m for v in row]


def zero_count(m) -> int:
    return sum(1 for v in _flat(m) if v == 0)


def repeat_count(m) -> int:
    """Largest multiplicity of a nonzero entry (0 if all entries vanish)."""
    counts: dict[object, int] = {}
    for v in _flat(m):
        if v != 0:
            counts[v] = counts.get(v, 0) + 1
    return max(counts.values(), default=0)


def repeats_lemma_holds(a, b) -> bool:
    """If A + B is a nonzero constant matrix then m*(A) >= m0(B); vacuous otherwise."""
    sums = {x + y for x, y in zip(_flat(a), _flat(b))}
    if len(sums) != 1 or sums == {0}:
        return True
    return repeat_count(a) >= zero_count(b)


def single_repeat_max(k: int, n: int) -> int:
    """max of m*(F_sigma^n) over sigma in S_k."""
    return max(repeat_count(_fuzzy_int(tuple(s), n)) for s in _sn(k))


def _max_on_line_avoiding_origin(points: dict[tuple[int, int], int]) -> int:
    """Most points (with multiplicity) on one line that misses the origin."""
    pts = list(points.items())
    best = 0
    for i, ((x0, y0), w0) in enumerate(pts):
        if (x0, y0) == (0, 0):
            continue
        best = max(best, w0)
        # lines through this point, keyed by reduced direction
        lines: dict[tuple[int, int], int] = {}
        for (x1, y1), w1 in pts[i + 1:]:
            dx, dy = x1 - x0, y1 - y0
            g = gcd(dx, dy)
            dx, dy = dx // g, dy // g
            if dx < 0 or (dx == 0 and dy < 0):
                dx, dy = -dx, -dy
            lines[(dx, dy)] = lines.get((dx, dy), 0) + w1
        for (dx, dy), w in lines.items():
            # the origin is on the line iff (x0, y0) is parallel to the direction
            if x0 * dy - y0 * dx == 0:
                continue
            best = max(best, w0 + w)
    return best


def _pair_points(a, b) -> dict[tuple[int, int], int]:
    pts: dict[tuple[int, int], int] = {}
    for p in zip(_flat(a), _flat(b)):
        pts[p] = pts.get(p, 0) + 1
    return pts


def _canonical_orbit_reps(k: int) -> list[tuple[int, ...]]:
    seen = set()
    reps = []
    for s in _sn(k):
        if s in seen:
            continue
        orbit = {apply_symmetry(g, s) for g in SYMMETRIES}
        seen |= orbit
        reps.append(tuple(s))
    return reps


def pair_repeat_max(k: int, l: int, n: int = 6) -> int:
    """max of m*(c1 F_sigma + c2 F_tau) over |sigma| = k, |tau| = l and real (c1, c2).

    An entry value v != 0 repeated at a set of positions means those positions'
    (F_sigma, F_tau) pairs lie on the line c1 X + c2 Y = v, which misses the
    origin; conversely every such line gives a valid (c1, c2, v).  So the
    answer is the largest number of positions whose entry pairs are collinear
    on a line avoiding the origin.
    """
    if n != 6:
        raise ValueError("pair repeat counts are supported for n = 6 only")
    if not (2 <= l <= n and 2 <= k <= n):
        raise ValueError("need 2 <= k, l <= n")
    best = 0
    # a symmetry applied to both matrices permutes entries, so sigma may be taken up to symmetry
    for s in _canonical_orbit_reps(k):
        a = _fuzzy_int(s, n)
        for t in _sn(l):
            best = max(best, _max_on_line_avoiding_origin(_pair_points(a, _fuzzy_int(tuple(t), n))))
    return best


def pair_repeat_max_candidates(a, b) -> int:
    """m* maximised over (c1, c2) by listing candidate coefficient pairs.

    Repeats at positions p != q need c1 (a_p - a_q) = c2 (b_q - b_p); WLOG
    c1 = 1 or (c1, c2) = (0, 1).  Used as an oracle for the collinearity method.
    """
    av = [Fraction(v) for v in _flat(a)]
    bv = [Fraction(v) for v in _flat(b)]
    cands = {(Fraction(0), Fraction(1)), (Fraction(1), Fraction(0))}
    for p, q in itertools.combinations(range(len(av)), 2):
        da, db = av[p] - av[q], bv[q] - bv[p]
        if db != 0:
            cands.add((Fraction(1), da / db))
    best = 0
    for c1, c2 in cands:
        best = max(best, repeat_count([[c1 * x + c2 * y for x, y in zip(av, bv)]]))
    return best


# -- profiles -------------------------------------------------------------------


def _first_row_support(profile: Sequence[int], n: int, upto: int) -> int:
    return sum(n - k + 1 for k in profile[:upto])


def profile_bounds(profile: Sequence[int], n: int | None = None) -> bool:
    """Necessary conditions on a length profile for a non-vanishing constant cover.

    Checks the first-row inequality, the degree bounds for every i >= 2, and
    that the first rows can jointly cover all n columns.
    """
    p = tuple(profile)
    r = len(p)
    if not 2 <= r <= 5 or any(a < b for a, b in zip(p, p[1:])) or p[-1] < 2:
        return False
    if n is None:
        n = p[0]
    if p[0] != n:
        return False
    if n - 2 > _first_row_support(p, n, r - 1):
        return False
    if n > _first_row_support(p, n, r):
        return False
    for i in range(1, r):
        if p[i] < n + 1 - _first_row_support(p, n, i):
            return False
    return True


def enumerate_profiles(r: int, n: int) -> list[tuple[int, ...]]:
    out = []
    for rest in itertools.combinations_with_replacement(range(n, 1, -1), r - 1):
        p = (n,) + rest
        if profile_bounds(p, n):
            out.append(p)
    return out


# -- covers ---------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantCover:
    terms: tuple[tuple[Fraction, Permutation], ...]
    n: int
    c: Fraction
    latin: bool = False
    reducible: bool = False

    @property
    def vanishing(self) -> bool:
        return self.c == 0

    def formal_sum(self) -> FormalSum:
        return FormalSum(self.terms)

    @property
    def profile(self) -> tuple[int, ...]:
        return tuple(sorted((len(p) for _, p in self.terms), reverse=True))

    def key(self) -> tuple:
        return tuple((-len(p), tuple(p), coeff) for coeff, p in self.terms)

    def __str__(self) -> str:
        return str(self.formal_sum())

    def to_json(self) -> dict[str, object]:
        return {
            "terms": [{"coeff": str(c), "perm": str(p)} for c, p in self.terms],
            "n": self.n,
            "c": str(self.c),
            "latin": self.latin,
            "reducible": self.reducible,
            "canonical": str(canonicalize_cover(self)),
        }


def _normalise(coeffs: Sequence[Fraction]) -> tuple[list[Fraction], Fraction]:
    """Integer coefficients with gcd 1 and the first nonzero one positive; returns the scale used."""
    den = reduce(lambda a, b: a * b // gcd(a, b), (c.denominator for c in coeffs), 1)
    ints = [int(c * den) for c in coeffs]
    g = reduce(gcd, (abs(v) for v in ints), 0) or 1
    first = next((v for v in ints if v), 1)
    sign = 1 if first > 0 else -1
    scale = Fraction(den * sign, g)
    return [c * scale for c in coeffs], scale


def _c_from_coeffs(terms: Iterable[tuple[Fraction, Permutation]], n: int) -> Fraction:
    return sum((c * Fraction(factorial(n - 1), factorial(len(p) - 1)) for c, p in terms), Fraction(0)) / n


def solve_cover(sigmas: Sequence[Permutation], n: int | None = None) -> list[ConstantCover]:
    """Basis of the coefficient vectors making sum c_i F_sigma_i constant."""
    sigmas = [parse_permutation(s) if isinstance(s, str) else s for s in sigmas]
    if not sigmas:
        return []
    if n is None:
        n = max(len(s) for s in sigmas)
    if n < max(len(s) for s in sigmas):
        raise ValueError("n is smaller than a permutation order")
    mats = [fuzzy_matrix(s, n) for s in sigmas]
    rows = []
    for x in range(n):
        for y in range(n):
            rows.append([m[x, y] for m in mats] + [Fraction(-1)])
    out = []
    for vec in nullspace(rows, len(sigmas) + 1):
        coeffs, scale = _normalise(vec[:-1])
        if not any(coeffs):
            continue
        c = vec[-1] * scale
        terms = tuple((co, s) for co, s in zip(coeffs, sigmas) if co)
        if c != _c_from_coeffs(terms, n):
            raise FuzzyIdentityError("cover constant disagrees with the row-sum formula")
        out.append(ConstantCover(terms, n, c))
    return out


def _apply_to_cover(g: Symmetry, cc: ConstantCover) -> tuple:
    terms = sorted(((c, apply_symmetry(g, p)) for c, p in cc.terms), key=lambda t: (-len(t[1]), tuple(t[1])))
    coeffs, scale = _normalise([c for c, _ in terms])
    return tuple((co, p) for co, (_, p) in zip(coeffs, terms)), scale


def canonicalize_cover(cc: ConstantCover) -> ConstantCover:
    """Least representative over the 8 symmetries, with normalised integer coefficients."""
    best = None
    for g in SYMMETRIES:
        terms, scale = _apply_to_cover(g, cc)
        key = tuple((-len(p), tuple(p), c) for c, p in terms)
        if best is None or key < best[0]:
            best = (key, terms, scale)
    _, terms, scale = best
    return ConstantCover(terms, cc.n, cc.c * scale, cc.latin, cc.reducible)


# -- classification search -------------------------------------------------------


@dataclass
class SearchResult:
    profile: tuple[int, ...]
    covers: list[ConstantCover] = field(default_factory=list)
    reducible: list[ConstantCover] = field(default_factory=list)
    nodes: int = 0
    deepest: int = 0
    refuted_at: int | None = None

    def to_json(self) -> dict[str, object]:
        return {
            "profile": list(self.profile),
            "count": len(self.covers),
            "covers": [c.to_json() for c in self.covers],
            "reducible": [c.to_json() for c in self.reducible],
            "nodes": self.nodes,
            "refuted_at": self.refuted_at,
        }


class _Echelon:
    """Integer reduced row echelon form, grown one equation at a time."""

    __slots__ = ("rows", "pivots")

    def __init__(self, rows=(), pivots=()):
        self.rows = list(rows)
        self.pivots = list(pivots)

    def add(self, vec: Sequence[int]) -> "_Echelon | None":
        """Return the enlarged echelon form, or None if a coordinate became forced to zero."""
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            a = v[p]
            if a:
                b = row[p]
                v = [b * x - a * y for x, y in zip(v, row)]
        q = next((i for i, x in enumerate(v) if x), None)
        if q is None:
            return self
        v = _primitive(v, q)
        rows = []
        for row in self.rows:
            a = row[q]
            if a:
                row = _primitive([v[q] * x - a * y for x, y in zip(row, v)], None)
            rows.append(row)
        rows.append(v)
        for row in rows:
            if sum(1 for x in row if x) == 1:
                return None
        return _Echelon(rows, self.pivots + [q])

    @property
    def rank(self) -> int:
        return len(self.rows)


def _primitive(v: list[int], q: int | None) -> list[int]:
    g = reduce(gcd, v, 0)
    if q is None:
        q = next(i for i, x in enumerate(v) if x)
    if v[q] < 0:
        g = -g
    return [x // g for x in v]


@lru_cache(maxsize=None)
def _row_window(k: int, n: int, x: int, window: tuple[int, ...], lo: int) -> tuple[int, ...]:
    """Row x of the integer fuzzy matrix, given sigma(lo), ..., sigma(lo + len(window) - 1)."""
    out = []
    for y in range(1, n + 1):
        s = 0
        for off, val in enumerate(window):
            j = lo + off
            s += comb(x - 1, j - 1) * comb(n - x, k - j) * comb(y - 1, val - 1) * comb(n - y, k - val)
        out.append(s)
    return tuple(out)


def _row(k: int, n: int, x: int, prefix: tuple[int, ...]) -> tuple[int, ...]:
    lo = max(1, x - (n - k))
    hi = min(k, x)
    return _row_window(k, n, x, prefix[lo - 1:hi], lo)


def _latin_sets(n: int) -> list[tuple[Permutation, ...]]:
    """All sets of n permutation matrices of order n that tile J_n."""
    by_first: dict[int, list[Permutation]] = {}
    for p in _sn(n):
        by_first.setdefault(p[0], []).append(p)
    out = []

    def rec(j: int, chosen: list[Permutation], used: list[set[int]]):
        if j > n:
            out.append(tuple(chosen))
            return
        for p in by_first[j]:
            if all(p[x] not in used[x] for x in range(n)):
                for x in range(n):
                    used[x].add(p[x])
                chosen.append(p)
                rec(j + 1, chosen, used)
                chosen.pop()
                for x in range(n):
                    used[x].discard(p[x])

    rec(1, [], [set() for _ in range(n)])
    return out


def _is_latin_profile(profile: Sequence[int]) -> bool:
    n = profile[0]
    return len(profile) == n and all(k == n for k in profile)


def latin_covers(n: int) -> list[ConstantCover]:
    """Latin-square covers up to symmetry (all coefficients one, c = 1)."""
    seen = {}
    for perms in _latin_sets(n):
        cc = ConstantCover(tuple((Fraction(1), p) for p in perms), n, Fraction(1), latin=True)
        can = canonicalize_cover(cc)
        seen.setdefault(can.key(), can)
    return [seen[k] for k in sorted(seen)]


def search_covers(
    profile: Sequence[int],
    budget: int = DEFAULT_BUDGET,
    max_depth: int | None = None,
    include_latin_general: bool = False,
) -> SearchResult:
    """All non-vanishing constant covers with the given length profile, up to symmetry.

    Rows of a fuzzy matrix up to m depend only on sigma(1..m), so candidate
    tuples are grown one row at a time and discarded as soon as the equations
    from the rows seen so far force some coefficient (or the constant) to be
    zero.  Tuples whose full solution space has dimension one are covers;
    larger solution spaces are families obtained by adding a smaller cover
    (such as nu or xi) and are reported as reducible.
    """
    prof = tuple(sorted(profile, reverse=True))
    result = SearchResult(prof)
    if not profile_bounds(prof):
        result.refuted_at = 0
        return result
    n = prof[0]
    if _is_latin_profile(prof) and not include_latin_general:
        result.covers = latin_covers(n)
        result.deepest = n
        return result
    r = len(prof)
    width = r + 1
    found: dict[tuple, ConstantCover] = {}
    reducible: dict[tuple, ConstantCover] = {}
    limit = n if max_depth is None else min(n, max_depth)

    def options(i: int, prefix: tuple[int, ...], m: int) -> list[tuple[int, ...]]:
        k = prof[i]
        if len(prefix) >= min(k, m):
            return [prefix]
        used = set(prefix)
        return [prefix + (v,) for v in range(1, k + 1) if v not in used]

    def combos(prefixes: tuple[tuple[int, ...], ...], m: int):
        out: list[tuple[tuple[int, ...], ...]] = []

        def rec(i: int, acc: list[tuple[int, ...]]):
            if i == r:
                out.append(tuple(acc))
                return
            for opt in options(i, prefixes[i], m):
                # equal lengths are kept in lexicographic order
                if i and prof[i] == prof[i - 1] and opt < acc[-1]:
                    continue
                acc.append(opt)
                rec(i + 1, acc)
                acc.pop()

        rec(0, [])
        return out

    def finish(prefixes, ech: _Echelon):
        perms = [Permutation._trusted(p) for p in prefixes]
        for i in range(1, r):
            if prof[i] == prof[i - 1] and perms[i] == perms[i - 1]:
                return
        if ech.rank == width - 1:
            for cc in solve_cover(perms, n):
                if cc.c != 0 and len(cc.terms) == r:
                    can = canonicalize_cover(cc)
                    found.setdefault(can.key(), can)
        else:
            sols = solve_cover(perms, n)
            rep = ConstantCover(
                tuple((Fraction(1), p) for p in perms), n, Fraction(0), reducible=True
            )
            if sols:
                total = [Fraction(0)] * r
                for cc in sols:
                    for c, p in cc.terms:
                        total[perms.index(p)] += c
                # a generic member of the family stands for it
                if all(total):
                    rep = ConstantCover(tuple(zip(total, perms)), n, sum((cc.c for cc in sols), Fraction(0)), reducible=True)
            can = canonicalize_cover(rep)
            reducible.setdefault(tuple((l, w) for l, w, _ in can.key()), can)

    def dfs(m: int, prefixes, ech: _Echelon):
        result.deepest = max(result.deepest, m)
        if m == limit:
            if limit == n:
                finish(prefixes, ech)
            return
        x = m + 1
        for combo in combos(prefixes, x):
            result.nodes += 1
            if result.nodes > budget:
                raise SearchBudgetExceeded(f"node budget {budget} exceeded for profile {prof}")
            rows = [_row(prof[i], n, x, combo[i]) for i in range(r)]
            e = ech
            for y in range(n):
                e = e.add([row[y] for row in rows] + [-1])
                if e is None:
                    break
            if e is not None:
                dfs(x, combo, e)

    dfs(0, tuple(() for _ in prof), _Echelon())
    result.covers = [found[k] for k in sorted(found)]
    result.reducible = [reducible[k] for k in sorted(reducible)]
    if not found and not reducible and result.deepest < limit:
        result.refuted_at = result.deepest + 1
    return result
