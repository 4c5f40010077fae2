"""Step permutons, their exact pattern densities, and local screening at the uniform point.

Orientation: ``weights[i][j]`` (0-based) is the cell in column ``i`` (x-interval
``[i/n, (i+1)/n]``) and row ``j`` (y-interval ``[j/n, (j+1)/n]``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, lcm
from typing import Sequence

import numpy as np

from .linalg import RationalMatrix, inertia, symmetric_eigenvalues
from .perms import FormalSum, Permutation, Symmetry, transform_points

__all__ = [
    "StepPermuton",
    "NotDoublyStochastic",
    "BoundViolation",
    "Straddle",
    "BudgetExceeded",
    "HessianReport",
    "make_perturbed",
    "b_matrix",
    "step_density",
    "step_density_float",
    "step_density_formal",
    "step_density_formal_float",
    "h_gradient",
    "h_hessian",
    "interpolate",
    "direct_sum_polynomial",
    "find_crossing",
    "witness_search",
]

MAX_ORDER = 5
MAX_GRID = 8
MAX_INTERP_GRID = 60


class NotDoublyStochastic(ValueError):
    pass


class BoundViolation(ValueError):
    pass


class Straddle(ValueError):
    """The two permutons do not bracket the uniform value."""


class BudgetExceeded(RuntimeError):
    pass


class StepPermuton:
    """mu[M] for an n x n doubly stochastic matrix M of exact rationals."""

    __slots__ = ("weights", "n")

    def __init__(self, weights: RationalMatrix | Sequence[Sequence[object]]):
        if not isinstance(weights, RationalMatrix):
            weights = RationalMatrix(weights)
        n = weights.rows
        if weights.cols != n:
            raise NotDoublyStochastic("weights must be square")
        if any(v < 0 for v in weights.entries()):
            raise NotDoublyStochastic("weights must be nonnegative")
        for i in range(n):
            if sum(weights.row(i)) != 1 or sum(weights[j, i] for j in range(n)) != 1:
                raise NotDoublyStochastic("every row and column must sum to 1")
        self.weights = weights
        self.n = n

    @classmethod
    def uniform(cls, n: int) -> "StepPermuton":
        return cls([[Fraction(1, n)] * n for _ in range(n)])

    @classmethod
    def from_permutation(cls, pi: Sequence[int]) -> "StepPermuton":
        """Column i carries all its mass in row pi(i)."""
        n = len(pi)
        return cls([[int(pi[i] == j + 1) for j in range(n)] for i in range(n)])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, StepPermuton) and self.weights == other.weights

    def __hash__(self) -> int:
        return hash(self.weights)

    def to_numpy(self) -> np.ndarray:
        return self.weights.to_numpy()

    def transform(self, s: Symmetry) -> "StepPermuton":
        n = self.n
        out = [[Fraction(0)] * n for _ in range(n)]
        cells = [(i + 1, j + 1) for i in range(n) for j in range(n)]
        for (i, j), (a, b) in zip(cells, transform_points(s, n, cells)):
            out[a - 1][b - 1] = self.weights[i - 1, j - 1]
        return StepPermuton(out)

    def to_json(self) -> dict[str, object]:
        return {"n": self.n, "weights": [[str(v) for v in row] for row in self.weights.tolist()]}

    def __repr__(self) -> str:
        return f"StepPermuton({self.weights!r})"


def b_matrix(i: int, j: int, n: int) -> list[list[int]]:
    """B_{i,j} (1-based): +1 at (i,j),(i+1,j+1) and -1 at (i+1,j),(i,j+1)."""
    b = [[0] * n for _ in range(n)]
    b[i - 1][j - 1] = b[i][j] = 1
    b[i][j - 1] = b[i - 1][j] = -1
    return b


def _variables(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n) for j in range(1, n)]


def make_perturbed(x: Sequence[Sequence[object]] | dict[tuple[int, int], object], n: int | None = None) -> StepPermuton:
    """M_x = J/n + sum x_ij B_ij, with |x_ij| <= 1/(4n).

    ``x`` is an (n-1) x (n-1) array or a mapping from 1-based (i, j).
    """
    if isinstance(x, dict):
        if n is None:
            raise ValueError("n is required when x is a mapping")
        vals = {k: Fraction(v) for k, v in x.items()}
    else:
        rows = [[Fraction(v) for v in row] for row in x]
        n = len(rows) + 1 if n is None else n
        vals = {(i + 1, j + 1): v for i, row in enumerate(rows) for j, v in enumerate(row)}
    bound = Fraction(1, 4 * n)
    m = [[Fraction(1, n)] * n for _ in range(n)]
    for (i, j), v in vals.items():
        if not (1 <= i < n and 1 <= j < n):
            raise BoundViolation(f"variable index ({i},{j}) out of range")
        if abs(v) > bound:
            raise BoundViolation(f"|x_{i},{j}| = {abs(v)} exceeds 1/(4n) = {bound}")
        m[i - 1][j - 1] += v
        m[i][j] += v
        m[i][j - 1] -= v
        m[i - 1][j] -= v
    return StepPermuton(m)


# -- exact densities -------------------------------------------------------------


@lru_cache(maxsize=64)
def _assignments(sigma: tuple[int, ...], g: int) -> tuple[np.ndarray, np.ndarray]:
    """Cell sequences for the x-sorted points and their integer weights.

    A term pairs nondecreasing columns c_1..c_k with rows that are
    nondecreasing along sigma's value order.  Its probability is
    (W / k!) * prod_t M(c_t, r_t) / g^k with
    W = (k! / prod col-block!) * (k! / prod row-block!).
    """
    k = len(sigma)
    cols = list(itertools.combinations_with_replacement(range(g), k))
    kf = factorial(k)

    def block_weight(seq) -> int:
        w = kf
        for _, grp in itertools.groupby(seq):
            w //= factorial(len(list(grp)))
        return w

    cw = np.array([block_weight(c) for c in cols], dtype=np.int64)
    C = np.array(cols, dtype=np.int64)
    # rows: R[s] for value rank s; the point at x-position t has row R[sigma(t)-1]
    R = C[:, np.asarray(sigma) - 1]
    cells = (C[:, None, :] * g + R[None, :, :]).reshape(-1, k)
    weights = (cw[:, None] * cw[None, :]).reshape(-1)
    return cells, weights


def _check_sizes(k: int, g: int) -> None:
    # the work is C(g+k-1, k)^2 cell assignments
    if k > MAX_ORDER:
        raise BudgetExceeded(f"pattern order {k} exceeds {MAX_ORDER}")
    if g > MAX_GRID or (k == MAX_ORDER and g > 6):
        raise BudgetExceeded(f"grid {g} is too large for patterns of order {k}")


def step_density(sigma: Permutation, mu: StepPermuton) -> Fraction:
    """Exact probability that |sigma| independent points from mu induce sigma."""
    k, g = len(sigma), mu.n
    _check_sizes(k, g)
    den = 1
    for v in mu.weights.entries():
        den = lcm(den, v.denominator)
    flat = [int(v * den) for v in mu.weights.entries()]
    cells, weights = _assignments(tuple(sigma), g)
    total = 0
    for row, w in zip(cells.tolist(), weights.tolist()):
        p = w
        for c in row:
            p *= flat[c]
            if not p:
                break
        total += p
    return Fraction(total, factorial(k) * (g * den) ** k)


def step_density_float(sigma: Permutation, weights: np.ndarray) -> float:
    g = weights.shape[0]
    k = len(sigma)
    _check_sizes(k, g)
    cells, w = _assignments(tuple(sigma), g)
    vals = np.asarray(weights, dtype=float).reshape(-1)[cells].prod(axis=1)
    return float(vals @ w) / (factorial(k) * g**k)


def step_density_formal(rho: FormalSum, mu: StepPermuton) -> Fraction:
    return sum((c * step_density(s, mu) for s, c in rho.items()), Fraction(0))


def step_density_formal_float(rho: FormalSum, weights: np.ndarray) -> float:
    return sum(float(c) * step_density_float(s, weights) for s, c in rho.items())


# -- derivatives at the uniform point ------------------------------------------


@lru_cache(maxsize=512)
def _uniform_derivatives(sigma: tuple[int, ...], g: int) -> tuple[tuple[Fraction, ...], tuple[tuple[Fraction, ...], ...]]:
    """Exact gradient and Hessian of d(sigma, mu[M]) in the g^2 cell weights at M = J/g."""
    k = len(sigma)
    cells, w = _assignments(sigma, g)
    g2 = g * g
    grad = np.zeros(g2, dtype=np.int64)
    hess = np.zeros(g2 * g2, dtype=np.int64)
    for t in range(k):
        grad += np.bincount(cells[:, t], weights=w, minlength=g2).astype(np.int64)
    for s in range(k):
        for t in range(k):
            if s != t:
                idx = cells[:, s] * g2 + cells[:, t]
                hess += np.bincount(idx, weights=w, minlength=g2 * g2).astype(np.int64)
    kf = factorial(k)
    gd = kf * g ** (2 * k - 1)
    hd = kf * g ** (2 * k - 2)
    grad_q = tuple(Fraction(int(v), gd) for v in grad)
    hess_q = tuple(
        tuple(Fraction(int(hess[u * g2 + v]), hd) for v in range(g2)) for u in range(g2)
    )
    return grad_q, hess_q


def _b_rows(n: int) -> list[list[int]]:
    return [[v for row in b_matrix(i, j, n) for v in row] for i, j in _variables(n)]


def _check_rho(rho: FormalSum, n: int) -> None:
    if n > 5:
        raise BudgetExceeded("derivatives are supported for n <= 5")
    if rho.max_order() > MAX_ORDER:
        raise BudgetExceeded(f"orders above {MAX_ORDER} are not supported")


def h_gradient(rho: FormalSum, n: int) -> list[Fraction]:
    """Exact gradient of x -> d(rho, mu[M_x]) at x = 0, variables ordered (1,1), (1,2), ..."""
    _check_rho(rho, n)
    g2 = n * n
    cell_grad = [Fraction(0)] * g2
    for sigma, c in rho.items():
        gs, _ = _uniform_derivatives(tuple(sigma), n)
        for u in range(g2):
            cell_grad[u] += c * gs[u]
    return [sum((b[u] * cell_grad[u] for u in range(g2) if b[u]), Fraction(0)) for b in _b_rows(n)]


@dataclass
class HessianReport:
    n: int
    dimension: int
    gradient: list[Fraction]
    hessian: RationalMatrix
    eigenvalues: list[float]
    inertia: tuple[int, int, int]

    @property
    def has_positive(self) -> bool:
        return self.inertia[0] > 0

    @property
    def has_negative(self) -> bool:
        return self.inertia[1] > 0

    @property
    def gradient_zero(self) -> bool:
        return not any(self.gradient)

    @property
    def adhoc_needed(self) -> bool:
        """True when the Hessian alone cannot show the expression is not forcing."""
        return not (self.has_positive and self.has_negative)

    def to_json(self) -> dict[str, object]:
        return {
            "n": self.n,
            "dimension": self.dimension,
            "gradient_zero": self.gradient_zero,
            "has_positive": self.has_positive,
            "has_negative": self.has_negative,
            "adhoc_needed": self.adhoc_needed,
            "inertia": list(self.inertia),
            "eigenvalues": [round(v, 12) for v in self.eigenvalues],
        }


def h_hessian(rho: FormalSum, n: int = 5) -> HessianReport:
    """Exact Hessian of x -> d(rho, mu[M_x]) at x = 0, by expanding the density polynomial."""
    _check_rho(rho, n)
    g2 = n * n
    cell_h = [[Fraction(0)] * g2 for _ in range(g2)]
    for sigma, c in rho.items():
        _, hs = _uniform_derivatives(tuple(sigma), n)
        for u in range(g2):
            row, src = cell_h[u], hs[u]
            for v in range(g2):
                if src[v]:
                    row[v] += c * src[v]
    B = _b_rows(n)
    # B H B^T with sparse B (four entries per row)
    support = [[(u, b[u]) for u in range(g2) if b[u]] for b in B]
    dim = len(B)
    hb = [[sum((s * cell_h[u][v] for u, s in sa), Fraction(0)) for v in range(g2)] for sa in support]
    h = [[sum((t * hb[a][v] for v, t in support[b]), Fraction(0)) for b in range(dim)] for a in range(dim)]
    hm = RationalMatrix(h)
    return HessianReport(
        n=n,
        dimension=dim,
        gradient=h_gradient(rho, n),
        hessian=hm,
        eigenvalues=symmetric_eigenvalues(hm),
        inertia=inertia(hm),
    )


# -- interpolation between permutons ---------------------------------------------


def interpolate(mu0: StepPermuton, mu1: StepPermuton, z: object) -> StepPermuton:
    """(1-z) mu0 on [0,1-z]^2 together with z mu1 on [1-z,1]^2, as one step permuton."""
    z = Fraction(z)
    if not 0 <= z <= 1:
        raise ValueError("z must lie in [0, 1]")
    if z == 0:
        return mu0
    if z == 1:
        return mu1
    n0, n1 = mu0.n, mu1.n
    N = _fine_grid(z, n0, n1)
    if N > MAX_INTERP_GRID:
        raise BudgetExceeded(f"interpolation grid {N} exceeds {MAX_INTERP_GRID}")
    a = int(N * (1 - z) / n0)
    b = int(N * z / n1)
    w = [[Fraction(0)] * N for _ in range(N)]
    for i in range(n0):
        for j in range(n0):
            v = mu0.weights[i, j] / a
            for di in range(a):
                for dj in range(a):
                    w[i * a + di][j * a + dj] = v
    off = n0 * a
    for i in range(n1):
        for j in range(n1):
            v = mu1.weights[i, j] / b
            for di in range(b):
                for dj in range(b):
                    w[off + i * b + di][off + j * b + dj] = v
    return StepPermuton(w)


def _fine_grid(z: Fraction, n0: int, n1: int) -> int:
    """Smallest N with N(1-z)/n0 and N z/n1 both integers."""
    return lcm(((1 - z) / n0).denominator, (z / n1).denominator)


def direct_sum_polynomial(rho: FormalSum, mu0: StepPermuton, mu1: StepPermuton) -> list[Fraction]:
    """Coefficients (in powers of z) of d(rho, mu_z) for the interpolated permuton mu_z.

    A sample of k points puts j of them in the lower block; they must carry the
    first j positions and the j smallest values, so sigma splits as a direct sum.
    """
    coeffs: list[Fraction] = [Fraction(0)] * (rho.max_order() + 1)
    for sigma, c in rho.items():
        k = len(sigma)
        for j in range(k + 1):
            if set(sigma[:j]) != set(range(1, j + 1)):
                continue
            alpha = Permutation._trusted(tuple(sigma[:j])) if j else None
            beta = Permutation._trusted(tuple(v - j for v in sigma[j:])) if j < k else None
            d0 = step_density(alpha, mu0) if alpha else Fraction(1)
            d1 = step_density(beta, mu1) if beta else Fraction(1)
            if not d0 or not d1:
                continue
            base = c * comb(k, j) * d0 * d1
            # (1 - z)^j z^(k - j)
            for i in range(j + 1):
                coeffs[k - j + i] += base * comb(j, i) * (-1) ** i
    return coeffs


def _poly_eval(coeffs: Sequence[Fraction], z: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def find_crossing(rho: FormalSum, mu0: StepPermuton, mu1: StepPermuton, width_exponent: int = 40) -> Fraction:
    """A dyadic z with d(rho, mu_z) within 1e-9 of d(rho, uniform), by bisection."""
    target = rho.uniform_value()
    poly = direct_sum_polynomial(rho, mu0, mu1)
    lo, hi = Fraction(0), Fraction(1)
    f_lo, f_hi = _poly_eval(poly, lo) - target, _poly_eval(poly, hi) - target
    if not (f_lo < 0 < f_hi):
        raise Straddle(f"need d(rho, mu0) < {target} < d(rho, mu1)")
    while hi - lo > Fraction(1, 2**width_exponent):
        mid = (lo + hi) / 2
        f = _poly_eval(poly, mid) - target
        if f == 0:
            return mid
        if f < 0:
            lo = mid
        else:
            hi = mid
    mid = (lo + hi) / 2
    if abs(float(_poly_eval(poly, mid) - target)) > 1e-9:
        raise Straddle("bisection did not reach the requested accuracy")
    return mid


# -- witness search ------------------------------------------------------------


def _basis_coords(weights: np.ndarray) -> np.ndarray:
    """x with weights = J/n + sum x_ij B_ij (2D cumulative sums of the deviation)."""
    n = weights.shape[0]
    d = weights - 1.0 / n
    return np.cumsum(np.cumsum(d, axis=0), axis=1)[: n - 1, : n - 1]


def _exact_from_coords(x: np.ndarray, n: int, denom: int) -> StepPermuton | None:
    m = [[Fraction(1, n)] * n for _ in range(n)]
    for i in range(n - 1):
        for j in range(n - 1):
            v = Fraction(round(float(x[i, j]) * denom), denom)
            m[i][j] += v
            m[i + 1][j + 1] += v
            m[i + 1][j] -= v
            m[i][j + 1] -= v
    if any(v < 0 for row in m for v in row):
        return None
    return StepPermuton(m)


def _confirm(rho: FormalSum, mu: StepPermuton, sign: int, target: Fraction) -> bool:
    return sign * (step_density_formal(rho, mu) - target) > 0


def _value_grad(rho: FormalSum, w: np.ndarray) -> tuple[float, np.ndarray]:
    """Float density of rho in mu[w] and its gradient in the cell weights."""
    g = w.shape[0]
    flat = w.reshape(-1)
    total = 0.0
    grad = np.zeros(g * g)
    for sigma, c in rho.items():
        k = len(sigma)
        cells, wt = _assignments(tuple(sigma), g)
        norm = float(c) / (factorial(k) * g**k)
        v = flat[cells]
        pre = np.ones_like(v)
        suf = np.ones_like(v)
        for t in range(1, k):
            pre[:, t] = pre[:, t - 1] * v[:, t - 1]
        for t in range(k - 2, -1, -1):
            suf[:, t] = suf[:, t + 1] * v[:, t + 1]
        total += norm * float((pre[:, -1] * v[:, -1]) @ wt)
        for t in range(k):
            grad += norm * np.bincount(cells[:, t], weights=wt * pre[:, t] * suf[:, t], minlength=g * g)
    return total, grad.reshape(g, g)


def _sinkhorn(w: np.ndarray, sweeps: int = 200) -> np.ndarray:
    for _ in range(sweeps):
        w = w / w.sum(axis=1, keepdims=True)
        w = w / w.sum(axis=0, keepdims=True)
    return w


def _mirror_descent(rho: FormalSum, sign: int, w: np.ndarray, iters: int, eta: float = 1.0) -> np.ndarray:
    """Exponentiated-gradient ascent of sign * d(rho, .) with Sinkhorn projection."""
    for _ in range(iters):
        _, grad = _value_grad(rho, w)
        grad = sign * grad
        scale = np.abs(grad).max() or 1.0
        w = _sinkhorn(w * np.exp(eta * grad / scale))
    return w


def _max_grid(k: int) -> int:
    return WITNESS_GRID.get(k, 2)


WITNESS_GRID = {1: 8, 2: 8, 3: 8, 4: 8, 5: 6}


def _rationalise(rho: FormalSum, w: np.ndarray, sign: int, target: Fraction) -> StepPermuton | None:
    g = w.shape[0]
    for eps in (0.0, 1e-9, 1e-7):
        x = _basis_coords((1 - eps) * w + eps / g)
        for denom in (10**6, 10**9, 10**12):
            mu = _exact_from_coords(x, g, denom)
            if mu is not None and _confirm(rho, mu, sign, target):
                return mu
    return None


def witness_search(
    rho: FormalSum,
    direction: str,
    seed: int = 0,
    grids: Sequence[int] | None = None,
    restarts: int = 6,
    iters: int = 400,
) -> StepPermuton | None:
    """Look for a step permuton with d(rho, mu) strictly below ("lt") or above ("gt") the uniform value.

    Permutation-matrix permutons on grids up to 5 are tried first.  Then seeded
    random starts are improved by exponentiated-gradient steps projected back
    to doubly stochastic matrices.  Float candidates are rounded in the
    B_{i,j} coordinates and confirmed exactly.  None means the budget ran out,
    which is inconclusive.
    """
    if direction not in ("lt", "gt"):
        raise ValueError("direction must be 'lt' or 'gt'")
    sign = -1 if direction == "lt" else 1
    target = rho.uniform_value()
    tf = float(target)
    if grids is None:
        grids = range(2, _max_grid(rho.max_order()) + 1)
    grids = [g for g in grids if g <= _max_grid(rho.max_order())]
    rng = np.random.default_rng(seed)

    for g in grids:
        if g > 5:
            continue
        for pi in itertools.permutations(range(1, g + 1)):
            mu = StepPermuton.from_permutation(pi)
            if sign * (step_density_formal_float(rho, mu.to_numpy()) - tf) > 1e-12 and _confirm(rho, mu, sign, target):
                return mu
    for g in grids:
        if g < 3:
            continue
        for _ in range(restarts):
            w = _sinkhorn(rng.random((g, g)) ** 3 + 1e-3)
            w = _mirror_descent(rho, sign, w, iters)
            if sign * (_value_grad(rho, w)[0] - tf) > 1e-13:
                mu = _rationalise(rho, w, sign, target)
                if mu is not None:
                    return mu
    return None
