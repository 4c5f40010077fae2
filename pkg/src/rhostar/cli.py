"""Command-line interface: ``rhostar <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .perms import FormalSum, PermutationError, density, formal_density, parse_formal_sum, parse_permutation

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _emit(args: argparse.Namespace, payload: object, text: str) -> None:
    """Write JSON when --json was given (to a path or stdout), otherwise plain text."""
    target = getattr(args, "json", None)
    if target is None:
        print(text)
        return
    body = json.dumps(payload, indent=2)
    if target == "-":
        print(body)
    else:
        with open(target, "w") as fh:
            fh.write(body + "\n")
        print(text)


def _add_json(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--json",
        nargs="?",
        const="-",
        default=None,
        metavar="PATH",
        help="emit JSON (to PATH, or stdout when no path is given)",
    )


def _cmd_verify(args: argparse.Namespace) -> int:
    from .certificate import builtin_certificate, parse_certificate_text, structural_checks, verify_identity

    cert = parse_certificate_text(open(args.certificate).read()) if args.certificate else builtin_certificate()
    report = verify_identity(cert)
    checks = structural_checks(cert)
    payload = report.to_json()
    payload["structure"] = checks
    ok = report.passed and all(checks.values())
    payload["pass"] = ok
    lines = [
        f"coefficients checked: {len(report.coefficients)}",
        f"identity holds: {report.identity_holds}",
        f"positive definite: {report.positive_definite}",
        "leading minors: " + ", ".join(str(m) for m in report.minors),
        "eigenvalues of 112 M: " + ", ".join(f"{v:.4f}" for v in report.eigenvalues),
    ]
    lines += [f"{k}: {v}" for k, v in checks.items()]
    lines.append("PASS" if ok else "FAIL")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def _parse_profile(text: str) -> tuple[int, ...]:
    try:
        prof = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad profile {text!r}; expected e.g. 4,4,3,2") from None
    if not prof or any(k < 1 for k in prof):
        raise UsageError(f"bad profile {text!r}")
    return prof


def _cmd_covers(args: argparse.Namespace) -> int:
    from .covers import enumerate_profiles, search_covers

    if args.all:
        profiles = [p for r in (4, 5) for n in (4, 5) for p in enumerate_profiles(r, n)]
    elif args.profile:
        profiles = [_parse_profile(p) for p in args.profile]
    else:
        raise UsageError("give --profile or --all")
    results = []
    lines = []
    for prof in profiles:
        res = search_covers(prof, budget=args.budget, max_depth=args.max_depth)
        results.append(res.to_json())
        status = f"refuted at depth {res.refuted_at}" if res.refuted_at is not None else f"{len(res.covers)} covers"
        lines.append(f"{','.join(map(str, res.profile))}: {status}")
        if args.verbose:
            lines += [f"  {c}" for c in res.covers]
    payload = results[0] if len(results) == 1 else results
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _load_cover_sums(path: str) -> list[FormalSum]:
    with open(path) as fh:
        data = json.load(fh)
    blocks = data if isinstance(data, list) else [data]
    sums = []
    for block in blocks:
        if isinstance(block, dict) and "covers" in block:
            sums += [FormalSum.from_json(c["terms"]) for c in block["covers"]]
        elif isinstance(block, dict) and "terms" in block:
            sums.append(FormalSum.from_json(block["terms"]))
        else:
            raise UsageError(f"{path}: unrecognised cover catalogue entry")
    return sums


def _cmd_hessian(args: argparse.Namespace) -> int:
    from .permutons import h_hessian

    if args.covers:
        sums = _load_cover_sums(args.covers)
    elif args.rho:
        sums = [parse_formal_sum(r) for r in args.rho]
    else:
        raise UsageError("give --covers FILE or --rho EXPR")
    rows = []
    lines = []
    for rho in sums:
        rep = h_hessian(rho, args.n)
        item = {"cover": str(rho), **rep.to_json()}
        rows.append(item)
        flag = "  ad hoc needed" if rep.adhoc_needed else ""
        lines.append(
            f"{rho}: gradient_zero={rep.gradient_zero} positive={rep.has_positive} negative={rep.has_negative}{flag}"
        )
    _emit(args, rows, "\n".join(lines))
    return EXIT_OK


def _cmd_witness(args: argparse.Namespace) -> int:
    from .permutons import step_density_formal, witness_search

    rho = parse_formal_sum(args.rho)
    mu = witness_search(rho, args.dir, seed=args.seed)
    if mu is None:
        _emit(args, {"found": False}, "no witness found (inconclusive)")
        return EXIT_FAIL
    value = step_density_formal(rho, mu)
    payload = {
        "found": True,
        "rho": str(rho),
        "direction": args.dir,
        "uniform_value": str(rho.uniform_value()),
        "density": str(value),
        "density_float": float(value),
        **mu.to_json(),
    }
    text = f"grid {mu.n}: d(rho, mu) = {float(value):.8f} vs uniform {float(rho.uniform_value()):.8f}"
    _emit(args, payload, text)
    return EXIT_OK


def _cmd_independence(args: argparse.Namespace) -> int:
    from .statistic import TiesPresent, independence_test, read_samples

    with (sys.stdin if args.input == "-" else open(args.input)) as fh:
        xs, ys = read_samples(fh)
    try:
        rep = independence_test(xs, ys, shuffles=args.shuffles, seed=args.seed, break_ties=args.break_ties)
    except TiesPresent as exc:
        raise UsageError(str(exc)) from None
    text = f"n={rep.n} statistic={rep.statistic_float:.6f} deviation={rep.deviation:+.6f} p={rep.p_value:.4g}"
    _emit(args, rep.to_json(), text)
    return EXIT_OK


def _cmd_density(args: argparse.Namespace) -> int:
    pi = parse_permutation(args.pi)
    if args.rho:
        rho = parse_formal_sum(args.rho)
        value = formal_density(rho, pi)
        label = str(rho)
    elif args.sigma:
        value = density(parse_permutation(args.sigma), pi)
        label = args.sigma
    else:
        raise UsageError("give --sigma or --rho")
    _emit(args, {"pattern": label, "pi": str(pi), "density": str(value)}, str(value))
    return EXIT_OK


def _cmd_fuzzy(args: argparse.Namespace) -> int:
    from .covers import cover_matrix, fuzzy_matrix

    sigma = parse_permutation(args.sigma)
    m = cover_matrix(sigma, args.n) if args.cover else fuzzy_matrix(sigma, args.n)
    rows = [[str(v) for v in row] for row in m.tolist()]
    width = max(len(v) for row in rows for v in row)
    text = "\n".join(" ".join(v.rjust(width) for v in row) for row in rows)
    _emit(args, {"sigma": str(sigma), "n": args.n, "cover": args.cover, "matrix": rows}, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rhostar", description="Exact tools around the rho* statistic.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-certificate", help="check the sum-of-squares identity exactly")
    p.add_argument("--certificate", help="plain-text certificate file (defaults to the bundled one)")
    _add_json(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("covers", help="classify non-vanishing constant covers for a length profile")
    p.add_argument("--profile", action="append", help="comma-separated lengths, e.g. 4,4,3,2 (repeatable)")
    p.add_argument("--all", action="store_true", help="every 4- and 5-term profile with n in {4, 5}")
    p.add_argument("--budget", type=int, default=10**8, help="search node budget")
    p.add_argument("--max-depth", type=int, default=None, help="stop the prefix search after this many rows")
    p.add_argument("-v", "--verbose", action="store_true", help="list the covers")
    _add_json(p)
    p.set_defaults(func=_cmd_covers)

    p = sub.add_parser("hessian-screen", help="Hessian signature of h_{rho,n} at the uniform point")
    p.add_argument("--covers", help="JSON catalogue written by the covers subcommand")
    p.add_argument("--rho", action="append", help="expression such as '3(1234) + 3(4321) - 4(123) + 3(12)'")
    p.add_argument("--n", type=int, default=5, help="grid size (default 5)")
    _add_json(p)
    p.set_defaults(func=_cmd_hessian)

    p = sub.add_parser("witness", help="search for a step permuton beating the uniform value")
    p.add_argument("--rho", required=True)
    p.add_argument("--dir", choices=("lt", "gt"), required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_json(p)
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("independence-test", help="permutation test of independence based on rho*")
    p.add_argument("--input", required=True, help="CSV file with two columns x,y ('-' for stdin)")
    p.add_argument("--shuffles", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--break-ties", action="store_true", help="break ties uniformly at random (seeded)")
    _add_json(p)
    p.set_defaults(func=_cmd_independence)

    p = sub.add_parser("density", help="exact pattern density d(sigma, pi)")
    p.add_argument("--sigma")
    p.add_argument("--rho")
    p.add_argument("--pi", required=True)
    _add_json(p)
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("fuzzy", help="print the fuzzy (or cover) matrix of sigma")
    p.add_argument("--sigma", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cover", action="store_true", help="print the cover matrix instead")
    _add_json(p)
    p.set_defaults(func=_cmd_fuzzy)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, PermutationError, ValueError, OSError) as exc:
        print(f"rhostar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
