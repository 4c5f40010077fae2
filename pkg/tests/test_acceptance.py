"""Acceptance checks, one per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line to the terminal
(also when run as ``python tests/test_acceptance.py``).  Tolerances are pinned
in the constants below.
"""
from __future__ import annotations

import itertools
import sys
import time
from fractions import Fraction
from math import comb, factorial

import numpy as np
import pytest

from rhostar.certificate import builtin_certificate, product_coefficient, structural_checks, verify_identity
from rhostar.covers import (
    ConstantCover,
    _canonical_orbit_reps,
    canonicalize_cover,
    decompose_fto_a,
    enumerate_profiles,
    fuzzy_matrix,
    pair_repeat_max,
    pair_repeat_max_candidates,
    search_covers,
    single_repeat_max,
)
from rhostar.perms import (
    RHO_STAR,
    FormalSum,
    count_pattern_bruteforce,
    enumerate_sn,
    parse_formal_sum,
    parse_permutation,
    standardize,
)
from rhostar.permutons import StepPermuton, h_hessian, step_density, step_density_formal, witness_search
from rhostar.statistic import SIX_PATTERNS, count_six_fast, independence_test, rho_star_statistic

EIGEN_TOL = 0.1
CERT_SECONDS = 60
REPEATS_SECONDS = 600
WITNESS_SECONDS = 1800
MC_SIGMAS = 4.0
MC_INSTANCES = 50
MC_SAMPLES = 20000
FAST_INSTANCES = 200
FAST_MAX_N = 40
LARGE_N = 2000
LARGE_SECONDS = 5.0
NULL_SIMS = 200
NULL_N = 100
NULL_SHUFFLES = 100
LEVEL = 0.05
LEVEL_RANGE = (0.01, 0.12)

EIGENVALUES = [243.3, 118.4, 104.4, 48.1, 10.7]

SINGLE_REPEATS = {
    (4, 2): 4, (4, 3): 4, (4, 4): 4,
    (5, 2): 9, (5, 3): 7, (5, 4): 4, (5, 5): 5,
    (6, 2): 4, (6, 3): 8, (6, 4): 8, (6, 5): 5, (6, 6): 6,
}
PAIR_REPEATS = {(4, 2): 12, (4, 3): 20, (4, 4): 12, (5, 2): 12, (5, 3): 12, (5, 4): 16, (5, 5): 9}

COVER_COUNTS = {
    (4, 4, 3, 2): 6, (4, 4, 3, 3): 4, (4, 4, 4, 4): 12, (5, 5, 4, 3): 4,
    (4, 4, 3, 3, 2): 6, (4, 4, 3, 3, 3): 2, (4, 4, 4, 3, 2): 13, (4, 4, 4, 3, 3): 4,
    (4, 4, 4, 4, 2): 11, (4, 4, 4, 4, 3): 9, (5, 5, 4, 3, 2): 13, (5, 5, 4, 3, 3): 6,
    (5, 5, 4, 4, 2): 7, (5, 5, 4, 4, 3): 1, (5, 5, 4, 4, 4): 2, (5, 5, 5, 5, 5): 192,
}
ADHOC = {(4, 4, 3, 3): 2, (4, 4, 4, 4, 2): 2, (5, 5, 5, 5, 5): 1}

FOUR_TERM = [
    "3(1234) + 3(4321) - 4(123) + 3(12)",
    "3(1234) + 3(4321) - 4(123) - 3(21)",
    "3(1324) + 3(4231) - 4(123) + 3(12)",
    "3(1324) + 3(4231) - 4(123) - 3(21)",
    "3(2143) + 3(3412) + 4(123) + 3(12)",
    "3(2413) + 3(3142) + 4(123) + 3(12)",
    "3(1234) + 3(4321) - 2(123) - 2(321)",
    "3(1324) + 3(4231) - 2(123) - 2(321)",
    "3(2143) + 3(3412) + 2(123) + 2(321)",
    "3(2413) + 3(3142) + 2(123) + 2(321)",
    "36(12345) - 36(52341) + 15(2143) + 10(321)",
    "36(12345) - 36(52341) - 15(3412) - 10(123)",
    "36(12435) - 36(52431) + 15(2143) + 10(321)",
    "36(12435) - 36(52431) - 15(3412) - 10(123)",
]

# reference forms with +3(12) are not constant covers; the +3(21) forms are
MISPRINTS = {
    "3(2143) + 3(3412) + 4(123) + 3(12)": "3(2143) + 3(3412) + 4(123) + 3(21)",
    "3(2413) + 3(3142) + 4(123) + 3(12)": "3(2413) + 3(3142) + 4(123) + 3(21)",
}

# the five semidefinite expressions, with the sign the Hessian is missing
RHOS = {
    "rho1": ("3(3412) + 3(2143) + 2(321) + 2(123)", "negative", "lt"),
    "rho2": ("-3(4231) - 3(1324) + 2(321) + 2(123)", "negative", "lt"),
    "rho3": ("6(4321) + 3(3412) - 4(1324) + 1234 + 3(12)", "negative", "lt"),
    "rho4": ("-6(4321) - 3(3412) + 4(1324) - 1234 + 3(21)", "positive", "gt"),
    "rho5": ("14253 + 25314 + 31425 + 42531 + 53142", "positive", "gt"),
}


def _report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    capman = _CAPTURE.get("manager")
    if capman is not None:
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)


_CAPTURE: dict[str, object] = {}


@pytest.fixture(autouse=True)
def _terminal(request):
    _CAPTURE["manager"] = request.config.pluginmanager.getplugin("capturemanager")
    yield
    _CAPTURE.pop("manager", None)


@pytest.fixture(scope="module")
def catalogue():
    """Every 4- and 5-term profile with n in {4, 5}, searched once."""
    out = {}
    for r in (4, 5):
        for n in (4, 5):
            for prof in enumerate_profiles(r, n):
                out[prof] = search_covers(prof)
    return out


def _orbit_key(rho: FormalSum) -> tuple:
    """Canonical key up to D4 symmetry and nonzero scaling (sign included)."""
    terms = tuple((c, p) for p, c in rho.items())
    cc = ConstantCover(terms, max(len(p) for _, p in terms), Fraction(0))
    return canonicalize_cover(cc).key()


def _is_constant_cover(rho: FormalSum) -> bool:
    """Constancy of the summed cover matrices, built from the definition over S_n.

    Cover and fuzzy matrices differ by a multiple of J, so this is the same
    test as for fuzzy matrices; non-vanishing is checked by catalogue membership.
    """
    n = rho.max_order()
    total = {}
    for pi in enumerate_sn(n):
        d = sum((c * Fraction(count_pattern_bruteforce(s, pi), comb(n, len(s))) for s, c in rho.items()), Fraction(0))
        for x in range(n):
            total[(x, pi[x] - 1)] = total.get((x, pi[x] - 1), Fraction(0)) + d
    values = set(total.values()) if len(total) == n * n else set(total.values()) | {Fraction(0)}
    return len(values) == 1


def check_1():
    start = time.perf_counter()
    rep = verify_identity(builtin_certificate())
    elapsed = time.perf_counter() - start
    eig = sorted(rep.eigenvalues, reverse=True)
    eig_ok = len(eig) == 5 and all(abs(a - b) < EIGEN_TOL for a, b in zip(eig, EIGENVALUES))
    all_target = len(rep.coefficients) == 720 and all(v == Fraction(11, 24) for v in rep.coefficients.values())
    ok = rep.passed and all_target and rep.positive_definite and eig_ok and elapsed < CERT_SECONDS
    detail = f"720 coefficients = 11/24: {all_target}; Sylvester: {rep.positive_definite}; 112M eigenvalues {[round(v, 2) for v in eig]}; {elapsed:.1f}s"
    return ok, detail


def check_2():
    c = builtin_certificate()
    pi = parse_permutation("123456")
    got = [product_coefficient(c, "x", i, j, pi) for i, j in ((1, 1), (2, 2), (1, 2), (2, 1))]
    want = [Fraction(7, 15), Fraction(2, 15), Fraction(1, 5), Fraction(1, 5)]
    return got == want, f"123456 contributions {[str(v) for v in got]}"


def check_3():
    checks = structural_checks(builtin_certificate())
    keys = ("quarter_turn", "x2_is_z1", "y2_is_z2")
    return all(checks[k] for k in keys), ", ".join(f"{k}={checks[k]}" for k in keys)


def check_4():
    tested = 0
    for n in range(1, 7):
        for k in range(1, min(4, n) + 1):
            for sigma in enumerate_sn(k):
                decompose_fto_a(sigma, n)
                f = fuzzy_matrix(sigma, n)
                if sum(1 for v in f.row(0) if v) != n - k + 1:
                    return False, f"first row of F_{sigma}^{n}"
                if any(sum(f.row(i)) != Fraction(factorial(n - 1), factorial(k - 1)) for i in range(n)):
                    return False, f"row sums of F_{sigma}^{n}"
                tested += 1
    return True, f"{tested} (sigma, n) pairs with |sigma| <= 4, n <= 6"


def _pair_repeat_oracle(k: int, l: int) -> int:
    """Literal candidate-coefficient count; the first factor runs over D4 orbit representatives."""
    mats = {s: fuzzy_matrix(s, 6) for s in enumerate_sn(l)}
    best = 0
    for rep in _canonical_orbit_reps(k):
        a = fuzzy_matrix(parse_permutation(",".join(map(str, rep))), 6)
        for b in mats.values():
            best = max(best, pair_repeat_max_candidates(a, b))
    return best


def check_5():
    start = time.perf_counter()
    t1 = {(n, k): single_repeat_max(k, n) for n, k in SINGLE_REPEATS}
    t2 = {kl: pair_repeat_max(*kl) for kl in PAIR_REPEATS}
    oracle = {kl: _pair_repeat_oracle(*kl) for kl in PAIR_REPEATS}
    elapsed = time.perf_counter() - start
    ok = t1 == SINGLE_REPEATS and t2 == PAIR_REPEATS and oracle == PAIR_REPEATS and elapsed < REPEATS_SECONDS
    detail = f"single repeats ({len(t1)} entries) exact: {t1 == SINGLE_REPEATS}; pair repeats exact: {t2 == PAIR_REPEATS}; candidate oracle agrees: {oracle == PAIR_REPEATS}; {elapsed:.0f}s"
    return ok, detail


def check_6(catalogue):
    counts = {p: len(res.covers) for p, res in catalogue.items() if res.covers}
    rows_ok = counts == COVER_COUNTS
    four = {c.key() for p in ((4, 4, 3, 2), (4, 4, 3, 3), (5, 5, 4, 3)) for c in catalogue[p].covers}
    matched, verbatim, corrected = set(), 0, 0
    for expr in FOUR_TERM:
        key = _orbit_key(parse_formal_sum(expr))
        if key in four:
            matched.add(key)
            verbatim += 1
        elif expr in MISPRINTS and not _is_constant_cover(parse_formal_sum(expr)):
            fixed = parse_formal_sum(MISPRINTS[expr])
            if _is_constant_cover(fixed) and _orbit_key(fixed) in four:
                matched.add(_orbit_key(fixed))
                corrected += 1
    four_ok = matched == four and len(four) == len(FOUR_TERM)
    refuted = []
    for prof in ((6, 6, 6, 5, 4), (7, 7, 6, 5, 4)):
        res = search_covers(prof, max_depth=3)
        refuted.append(res.refuted_at is not None and res.refuted_at <= 3 and not res.covers)
    mixed = sum(v for p, v in counts.items() if len(p) == 5 and p != (5, 5, 5, 5, 5))
    ok = rows_ok and four_ok and all(refuted)
    detail = f"cover counts per profile exact: {rows_ok} (mixed 5-term total {mixed}); 14 expressions found: {four_ok} ({verbatim} verbatim, {corrected} reference +3(12) forms shown non-constant and found as +3(21)); refutations at depth <= 3: {refuted}"
    return ok, detail


def check_7(catalogue):
    start = time.perf_counter()
    # 4-term latin squares are settled separately; everything else is screened
    screened = [c for p, res in catalogue.items() if p != (4, 4, 4, 4) for c in res.covers]
    flagged = {}
    for c in screened:
        rep = h_hessian(c.formal_sum(), 5)
        if not rep.gradient_zero:
            return False, f"nonzero gradient for {c}"
        if rep.adhoc_needed:
            flagged[_orbit_key(c.formal_sum())] = c.profile
    rho_keys = {name: _orbit_key(parse_formal_sum(expr)) for name, (expr, _, _) in RHOS.items()}
    match = set(flagged) == set(rho_keys.values()) and len(flagged) == 5
    per_row = {}
    for prof in flagged.values():
        per_row[prof] = per_row.get(prof, 0) + 1
    signs_ok = True
    witnesses = []
    for name, (expr, missing, direction) in RHOS.items():
        rho = parse_formal_sum(expr)
        rep = h_hessian(rho, 5)
        lacks = "negative" if not rep.has_negative else ("positive" if not rep.has_positive else None)
        signs_ok &= lacks == missing
        mu = witness_search(rho, direction, seed=0)
        if mu is None:
            witnesses.append(False)
            continue
        value, base = step_density_formal(rho, mu), rho.uniform_value()
        witnesses.append(value < base if direction == "lt" else value > base)
    elapsed = time.perf_counter() - start
    ok = match and per_row == ADHOC and signs_ok and all(witnesses) and elapsed < WITNESS_SECONDS
    detail = (
        f"screened {len(screened)} covers, {len(flagged)} semidefinite, match rho1..rho5: {match}; "
        f"per row {per_row == ADHOC}; sign pattern: {signs_ok}; witnesses: {witnesses}; {elapsed:.0f}s"
    )
    return ok, detail


def _random_step(g, rng):
    w = [[Fraction(0)] * g for _ in range(g)]
    parts = rng.integers(1, 5, size=3)
    for part in parts:
        pi = rng.permutation(g)
        for i in range(g):
            w[i][pi[i]] += Fraction(int(part), int(parts.sum()))
    return StepPermuton(w)


def _sample_hits(weights, sigma, rng, size):
    g, k = weights.shape[0], len(sigma)
    cells = rng.choice(g * g, size=(size, k), p=(weights / g).reshape(-1))
    xs = (cells // g + rng.random((size, k))) / g
    ys = (cells % g + rng.random((size, k))) / g
    ys = np.take_along_axis(ys, np.argsort(xs, axis=1), axis=1)
    ranks = np.argsort(np.argsort(ys, axis=1), axis=1) + 1
    return np.all(ranks == np.asarray(sigma), axis=1).mean()


def check_8():
    uniform_ok = step_density_formal(RHO_STAR, StepPermuton.uniform(4)) == Fraction(11, 24)
    rng = np.random.default_rng(2024)
    sums_ok = True
    for k in range(1, 5):
        for g in range(1, 4):
            mu = _random_step(g, rng)
            sums_ok &= sum(step_density(s, mu) for s in enumerate_sn(k)) == 1
    worst = 0.0
    for _ in range(MC_INSTANCES):
        g = int(rng.integers(2, 5))
        k = int(rng.integers(2, 5))
        sigma = enumerate_sn(k)[int(rng.integers(factorial(k)))]
        mu = _random_step(g, rng)
        exact = float(step_density(sigma, mu))
        se = max(np.sqrt(exact * (1 - exact) / MC_SAMPLES), 1.0 / MC_SAMPLES)
        worst = max(worst, abs(_sample_hits(mu.to_numpy(), sigma, rng, MC_SAMPLES) - exact) / se)
    ok = uniform_ok and sums_ok and worst < MC_SIGMAS
    return ok, f"uniform value 11/24: {uniform_ok}; sums to 1: {sums_ok}; worst Monte Carlo deviation {worst:.2f} SE over {MC_INSTANCES}"


def _six_quartic(pi):
    """O(n^4) oracle: classify every subset of size 3 and 4."""
    counts = dict.fromkeys(SIX_PATTERNS, 0)
    for k in (3, 4):
        for idx in itertools.combinations(range(len(pi)), k):
            p = standardize(pi[i] for i in idx)
            if p in counts:
                counts[p] += 1
    return counts


def check_9():
    rng = np.random.default_rng(7)
    agree = True
    for _ in range(FAST_INSTANCES):
        n = int(rng.integers(4, FAST_MAX_N + 1))
        pi = (rng.permutation(n) + 1).tolist()
        agree &= count_six_fast(pi) == _six_quartic(pi)
    big = (rng.permutation(LARGE_N) + 1).tolist()
    start = time.perf_counter()
    rho_star_statistic(big)
    elapsed = time.perf_counter() - start
    ok = agree and elapsed < LARGE_SECONDS
    return ok, f"{FAST_INSTANCES} random permutations up to n={FAST_MAX_N} agree: {agree}; n={LARGE_N} statistic in {elapsed:.2f}s"


def check_10():
    rng = np.random.default_rng(99)
    rejections = 0
    for sim in range(NULL_SIMS):
        xs, ys = rng.random(NULL_N).tolist(), rng.random(NULL_N).tolist()
        rep = independence_test(xs, ys, shuffles=NULL_SHUFFLES, seed=sim)
        rejections += rep.p_value <= LEVEL
    level = rejections / NULL_SIMS
    xs = rng.random(NULL_N).tolist()
    power = independence_test(xs, [3 * x + 1 for x in xs], shuffles=NULL_SHUFFLES, seed=1)
    floor = 1 / (NULL_SHUFFLES + 1)
    ok = LEVEL_RANGE[0] <= level <= LEVEL_RANGE[1] and power.p_value <= floor
    return ok, f"empirical level {level:.3f} at nominal {LEVEL}; comonotone p = {power.p_value:.4f} (floor {floor:.4f})"


def _run(n, *args):
    ok, detail = CHECKS[n](*args)
    _report(n, ok, detail)
    return ok


CHECKS = {1: check_1, 2: check_2, 3: check_3, 4: check_4, 5: check_5, 6: check_6, 7: check_7, 8: check_8, 9: check_9, 10: check_10}


def test_criterion_1():
    assert _run(1)


def test_criterion_2():
    assert _run(2)


def test_criterion_3():
    assert _run(3)


def test_criterion_4():
    assert _run(4)


def test_criterion_5():
    assert _run(5)


def test_criterion_6(catalogue):
    assert _run(6, catalogue)


def test_criterion_7(catalogue):
    assert _run(7, catalogue)


def test_criterion_8():
    assert _run(8)


def test_criterion_9():
    assert _run(9)


def test_criterion_10():
    assert _run(10)


if __name__ == "__main__":
    cat = {p: search_covers(p) for r in (4, 5) for n in (4, 5) for p in enumerate_profiles(r, n)}
    results = [_run(n, cat) if n in (6, 7) else _run(n) for n in CHECKS]
    sys.exit(0 if all(results) else 1)
