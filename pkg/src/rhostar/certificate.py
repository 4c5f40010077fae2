"""The sum-of-squares certificate for rho* and its exact verification."""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import comb

from . import certdata
from .flags import RootedSum, flag_product, parse_rooted, quarter_turn, root_type, unroot
from .linalg import NotSymmetric, RationalMatrix, leading_minors, symmetric_eigenvalues
from .perms import RHO_STAR, FormalSum, Permutation, _sn, parse_permutation, project_up

__all__ = [
    "Certificate",
    "VerificationReport",
    "builtin_certificate",
    "parse_certificate_text",
    "certificate_checksum",
    "EXPECTED_CHECKSUM",
    "verify_identity",
    "check_positive_definite",
    "float_eigenvalues",
    "product_coefficient",
]

TARGET = Fraction(11, 24)
ORDER = 6

EXPECTED_CHECKSUM = "b15de021f495f796c1252068dd6b224097c48bb1c119c04bdfd96a67873a65e1"


@dataclass(frozen=True)
class Certificate:
    x: tuple[RootedSum, ...]
    y: tuple[RootedSum, ...]
    M: RationalMatrix
    rho_star: FormalSum
    target: Fraction = TARGET
    z1: RootedSum | None = None
    z2: RootedSum | None = None

    def with_entry(self, i: int, j: int, value: object) -> "Certificate":
        """Copy with ``M[i, j]`` (0-based) replaced; symmetric entries are left alone."""
        rows = self.M.tolist()
        rows[i][j] = Fraction(value)
        return Certificate(self.x, self.y, RationalMatrix(rows), self.rho_star, self.target, self.z1, self.z2)


@dataclass
class VerificationReport:
    coefficients: dict[Permutation, Fraction]
    passed: bool
    minors: list[Fraction]
    eigenvalues: list[float]
    identity_holds: bool = False
    positive_definite: bool = False
    residuals: dict[Permutation, Fraction] = field(default_factory=dict)

    def to_json(self) -> dict[str, object]:
        return {
            "pass": self.passed,
            "identity_holds": self.identity_holds,
            "positive_definite": self.positive_definite,
            "checked": len(self.coefficients),
            "residuals": [
                {"perm": str(p), "residual": str(r)} for p, r in sorted(self.residuals.items())
            ],
            "minors": [str(m) for m in self.minors],
            "eigenvalues": [round(v, 6) for v in self.eigenvalues],
        }


def _pairs_to_sum(pairs) -> RootedSum:
    terms: list[tuple[int, object]] = []
    for plus, minus in pairs:
        terms.append((1, parse_rooted(plus)))
        terms.append((-1, parse_rooted(minus)))
    return RootedSum(terms)


def _matrix() -> RationalMatrix:
    return RationalMatrix([[Fraction(v, certdata.M_SCALE) for v in row] for row in certdata.M_NUMERATORS])


def builtin_certificate() -> Certificate:
    return Certificate(
        x=tuple(_pairs_to_sum(p) for p in certdata.X),
        y=tuple(_pairs_to_sum(p) for p in certdata.Y),
        M=_matrix(),
        rho_star=RHO_STAR,
        z1=_pairs_to_sum(certdata.Z1),
        z2=_pairs_to_sum(certdata.Z2),
    )


def certificate_checksum() -> str:
    payload = json.dumps(
        {"x": certdata.X, "y": certdata.Y, "m": certdata.M_NUMERATORS, "scale": certdata.M_SCALE},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


_VEC = re.compile(r"([xyz])_(\d)\s*:=")
_PERM = re.compile(r"\\perm\{((?:\\underline\{\d\}|\d)+)\}")
_PIECE = re.compile(r"\\underline\{(\d)\}|(\d)")


def _rooted_from_latex(body: str):
    word, roots = [], []
    for pos, m in enumerate(_PIECE.finditer(body), 1):
        if m.group(1):
            word.append(m.group(1))
            roots.append(pos)
        else:
            word.append(m.group(2))
    return parse_rooted("".join(word), roots)


def _signed_terms(text: str):
    """Yield (sign, latex body) for each \\perm; a perm after '-' is negative."""
    pos = 0
    for m in _PERM.finditer(text):
        gap = text[pos:m.start()]
        yield (-1 if "-" in gap else 1), m.group(1)
        pos = m.end()


def parse_certificate_text(text: str | None = None) -> Certificate:
    """Independent reader for the bundled plain-text certificate file."""
    if text is None:
        text = resources.files("rhostar").joinpath("data/certificate.txt").read_text()
    vectors: dict[str, list[str]] = {}
    current = None
    matrix_rows: list[list[int]] = []
    scale = None
    in_matrix = False
    rho_line = target_line = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            in_matrix = False if not line else in_matrix
            continue
        m = _VEC.match(line)
        if m:
            current = f"{m.group(1)}{m.group(2)}"
            vectors[current] = [line[m.end():]]
            in_matrix = False
            continue
        if line.startswith("M_scale"):
            scale = int(line.split(":=")[1])
            continue
        if line.startswith("M :=") or line == "M:=":
            in_matrix = True
            current = None
            continue
        if line.startswith("rho_star"):
            rho_line = line.split(":=", 1)[1]
            in_matrix = False
            continue
        if line.startswith("target"):
            target_line = line.split(":=", 1)[1].strip()
            continue
        if in_matrix:
            matrix_rows.append([int(v) for v in line.split()])
            continue
        if current is not None and line.startswith("+"):
            vectors[current].append(line)
    sums = {}
    for name, chunks in vectors.items():
        terms = []
        for sign, body in _signed_terms(" ".join(chunks)):
            terms.append((sign, _rooted_from_latex(body)))
        sums[name] = RootedSum(terms)
    if scale is None or len(matrix_rows) != 5:
        raise ValueError("certificate text is missing the matrix")
    M = RationalMatrix([[Fraction(v, scale) for v in row] for row in matrix_rows])
    rho = _parse_rho(rho_line) if rho_line else RHO_STAR
    target = Fraction(target_line) if target_line else TARGET
    return Certificate(
        x=tuple(sums[f"x{i}"] for i in range(1, 6)),
        y=tuple(sums[f"y{i}"] for i in range(1, 6)),
        M=M,
        rho_star=rho,
        target=target,
        z1=sums.get("z1"),
        z2=sums.get("z2"),
    )


def _parse_rho(line: str) -> FormalSum:
    terms: list[tuple[Fraction, Permutation]] = []
    factor = Fraction(1)
    for m in re.finditer(r"\\frac\{(\d+)\}\{(\d+)\}\\left\(|\\right\)|\\perm\{(\d+)\}", line):
        if m.group(1):
            factor = Fraction(int(m.group(1)), int(m.group(2)))
        elif m.group(3):
            terms.append((factor, parse_permutation(m.group(3))))
        else:
            factor = Fraction(1)
    return FormalSum(terms)


def _product_table(vecs: tuple[RootedSum, ...]) -> dict[tuple[int, int], FormalSum]:
    """Unrooted products for i <= j (0-based)."""
    out = {}
    for i in range(len(vecs)):
        for j in range(i, len(vecs)):
            out[(i, j)] = unroot(flag_product(vecs[i], vecs[j]))
    return out


def product_coefficient(c: Certificate, which: str, i: int, j: int, pi: Permutation) -> Fraction:
    """Coefficient of ``pi`` in the unrooted product of entries ``i, j`` (1-based) of x or y."""
    vecs = c.x if which == "x" else c.y
    return unroot(flag_product(vecs[i - 1], vecs[j - 1]))[pi]


def _quadratic_form(vecs: tuple[RootedSum, ...], M: RationalMatrix) -> dict[Permutation, Fraction]:
    table = _product_table(vecs)
    total: dict[Permutation, Fraction] = {}
    for (i, j), prod in table.items():
        # M need not be symmetric here (perturbation tests); use both entries
        weight = M[i, j] if i == j else M[i, j] + M[j, i]
        if weight == 0:
            continue
        for p, v in prod.items():
            total[p] = total.get(p, Fraction(0)) + weight * v
    return total


def verify_identity(c: Certificate) -> VerificationReport:
    """Check that every coefficient of the certificate identity over S_6 equals the target."""
    projected = project_up(c.rho_star, ORDER)
    qx = _quadratic_form(c.x, c.M)
    qy = _quadratic_form(c.y, c.M)
    coeffs: dict[Permutation, Fraction] = {}
    residuals = {}
    for pi in _sn(ORDER):
        v = projected[pi] - qx.get(pi, Fraction(0)) - qy.get(pi, Fraction(0))
        coeffs[pi] = v
        if v != c.target:
            residuals[pi] = v - c.target
    try:
        pd, minors = check_positive_definite(c.M)
    except NotSymmetric:
        pd, minors = False, []
    try:
        eig = float_eigenvalues(c.M * certdata.M_SCALE)
    except NotSymmetric:
        eig = []
    identity_ok = not residuals
    return VerificationReport(
        coefficients=coeffs,
        passed=identity_ok and pd,
        minors=minors,
        eigenvalues=eig,
        identity_holds=identity_ok,
        positive_definite=pd,
        residuals=residuals,
    )


def check_positive_definite(m: RationalMatrix) -> tuple[bool, list[Fraction]]:
    """Sylvester's criterion over the rationals."""
    if not m.is_symmetric():
        raise NotSymmetric("positive definiteness is only checked for symmetric matrices")
    minors = leading_minors(m)
    return all(v > 0 for v in minors), minors


def float_eigenvalues(m: RationalMatrix) -> list[float]:
    return symmetric_eigenvalues(m)


def structural_checks(c: Certificate) -> dict[str, bool]:
    """Root types, the quarter-turn relation between x and y, and the uniqueness data."""
    tau12, tau21 = parse_permutation("12"), parse_permutation("21")
    return {
        "x_root_type_12": all(root_type(rp) == tau12 for v in c.x for rp in v),
        "y_root_type_21": all(root_type(rp) == tau21 for v in c.y for rp in v),
        "quarter_turn": all(quarter_turn(xi) == yi for xi, yi in zip(c.x, c.y)),
        "x2_is_z1": c.z1 is not None and c.x[1] == c.z1,
        "y2_is_z2": c.z2 is not None and c.y[1] == c.z2,
        "M_symmetric": c.M.is_symmetric(),
    }


def unrooting_factor(order: int = 4, roots: int = 2) -> Fraction:
    return Fraction(1, comb(order, roots))
