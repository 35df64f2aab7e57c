"""Command-line front end.

Exit status: 0 on success (proved, accepted, rendered), 1 when a bound is
not LP-provable or a certificate is rejected, 2 on bad input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from itertools import product
from pathlib import Path

from . import certificates, frontier, grammar
from .caching_model import build_model
from .certificates import Certificate
from .errors import (
    CacheboundError,
    DocumentError,
    DuplicateDemand,
    ImageOutsideUniverse,
    InvalidDemand,
    ParseError,
    UniverseTooLarge,
)
from .lp_exact import assemble, minimize, prove_inequality
from .presets import PRESETS
from .symmetry import make_orbit_map

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
INPUT_ERRORS = (ParseError, DocumentError, InvalidDemand, DuplicateDemand,
                UniverseTooLarge, ImageOutsideUniverse)
SURVEY_TARGETS = ("6*M+3*R>=8", "12*M+18*R>=29", "3*M+6*R>=8")


def _add_model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--preset", choices=sorted(PRESETS), help="named configuration")
    g.add_argument("--files", type=int, help="number of files N")
    g.add_argument("--users", type=int, help="number of users K")
    g.add_argument("--demands", help="comma-separated demand strings, e.g. 201,210 (default: all)")
    g.add_argument("--cap", type=int, default=16, help="maximum number of variables (default 16)")
    s = p.add_mutually_exclusive_group()
    s.add_argument("--symmetry", choices=["full", "stabilizer", "none"], default="full",
                   help="user-permutation reduction (default full)")
    s.add_argument("--no-symmetry", dest="symmetry", action="store_const", const="none",
                   help="same as --symmetry none")


def _model(args):
    if args.preset:
        if args.files or args.users or args.demands:
            raise InvalidDemand("--preset cannot be combined with --files/--users/--demands")
        m = build_model(preset=args.preset, cap=args.cap)
    else:
        if args.files is None or args.users is None:
            raise InvalidDemand("give --preset or both --files and --users")
        if args.demands:
            demands = [grammar.parse_demand(d.strip()) for d in args.demands.split(",")]
        else:
            demands = list(product(range(args.files), repeat=args.users))
        m = build_model(args.files, args.users, demands, cap=args.cap)
    return m, make_orbit_map(m.universe, args.symmetry, cap=args.cap)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_prove(args) -> int:
    lam, mu, c = grammar.parse_inequality(args.ineq)
    if lam < 0 or mu < 0:
        raise ParseError("inequality weights on M and R must be nonnegative")
    m, om = _model(args)
    result = prove_inequality(m, om, lam, mu, c, cap=args.cap)
    if isinstance(result, Certificate):
        verdict = result.verify()
        if not verdict:
            print(f"internal error: extracted certificate rejected: {verdict.describe()}", file=sys.stderr)
            return EXIT_FAIL
        _emit(result.dumps(), args.out)
        print(f"proved {grammar.format_halfplane(lam, mu, c)} ({len(result.rows)} rows)", file=sys.stderr)
        return EXIT_OK
    print(result.describe())
    return EXIT_FAIL


def cmd_solve(args) -> int:
    try:
        a, b = (grammar.parse_rational(v.strip()) for v in args.objective.split(","))
    except ValueError:
        raise ParseError(f"objective must be 'a,b': {args.objective!r}") from None
    m, om = _model(args)
    p = assemble(m, om, (a, b), cap=args.cap)
    sol = minimize(p)
    if sol.status != "Optimal":
        print(f"status: {sol.status}")
        return EXIT_FAIL
    point = sol.primal
    lines = [
        f"objective: {grammar.format_rational(a)}*M+{grammar.format_rational(b)}*R",
        f"minimum: {grammar.format_rational(sol.value)}",
        f"at: M={grammar.format_rational(point[grammar.MEMORY])}, "
        f"R={grammar.format_rational(point[grammar.RATE])}",
        f"bound: {grammar.format_halfplane(a, b, sol.value)}",
    ]
    if args.approx:
        lines.append(f"approx (display only): minimum ~ {float(sol.value):.6f}")
    print("\n".join(lines))
    if args.out:
        cert = certificates.extract(sol, p)
        cert.save(args.out)
    return EXIT_OK


def _load(path: str) -> Certificate:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    return certificates.loads(text)


def cmd_verify(args) -> int:
    cert = _load(args.path)
    verdict = cert.verify()
    print(verdict.describe())
    return EXIT_OK if verdict else EXIT_FAIL


def cmd_render(args) -> int:
    cert = _load(args.path)
    verdict = cert.verify()
    if not verdict:
        print(verdict.describe(), file=sys.stderr)
        return EXIT_FAIL
    if args.format == "chain":
        text = certificates.render_chain(cert)
    elif args.format == "latex":
        text = certificates.render_table(cert).to_latex()
    else:
        text = certificates.render_table(cert).to_text()
    _emit(text, args.out)
    return EXIT_OK


def cmd_region(args) -> int:
    if args.builtin:
        fr = frontier.region(builtin=args.builtin)
    else:
        m, om = _model(args)
        fr = frontier.region(m, om, frontier.parse_sweep(args.sweep))
    outputs = {"csv": fr.to_csv(), "halfplanes": fr.halfplane_lines()}
    if args.inner:
        if args.inner != "3x3":
            raise ParseError(f"unknown inner bound {args.inner!r}")
        outputs["inner"] = frontier.points_csv(frontier.inner_bound_3x3())
    if args.out:
        base = Path(args.out)
        base.with_suffix(".csv").write_text(outputs["csv"])
        base.with_suffix(".halfplanes").write_text(outputs["halfplanes"])
        if "inner" in outputs:
            base.with_name(base.stem + "-inner.csv").write_text(outputs["inner"])
    else:
        sys.stdout.write("# vertices\n" + outputs["csv"])
        sys.stdout.write("# halfplanes\n" + outputs["halfplanes"])
        facets = [str(h) for h in fr.facets]
        sys.stdout.write("# facets\n" + "".join(f"{f}\n" for f in facets))
        if "inner" in outputs:
            sys.stdout.write("# inner bound\n" + outputs["inner"])
    return EXIT_OK


def cmd_survey(args) -> int:
    """Attempt bounds on several presets and report which are LP-provable there."""
    names = args.presets.split(",") if args.presets else sorted(PRESETS)
    targets = args.ineq or list(SURVEY_TARGETS)
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    for name in names:
        m = build_model(preset=name.strip(), cap=args.cap)
        om = make_orbit_map(m.universe, args.symmetry, cap=args.cap)
        for text in targets:
            lam, mu, c = grammar.parse_inequality(text)
            result = prove_inequality(m, om, lam, mu, c, cap=args.cap)
            label = grammar.format_halfplane(lam, mu, c)
            if isinstance(result, Certificate):
                verdict = result.verify()
                if not verdict:
                    print(f"internal error: certificate rejected: {verdict.describe()}", file=sys.stderr)
                    return EXIT_FAIL
                status = "LP-provable with certificate"
                if outdir:
                    result.save(outdir / f"{name}_{label.replace('*', '').replace('>=', '_ge_')}.cert")
            else:
                status = (f"not provable at this subset (LP minimum "
                          f"{grammar.format_rational(result.value)})")
            print(f"{name}: {label}: {status}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cachebound",
                                     description="Exact LP outer bounds for coded caching.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="prove a*M+b*R>=c and write its certificate")
    _add_model_args(p)
    p.add_argument("--ineq", required=True, help='inequality such as "1*M+1*R>=2"')
    p.add_argument("--out", help="certificate path (default: stdout)")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("solve", help="minimize a*M+b*R over the LP region")
    _add_model_args(p)
    p.add_argument("--objective", required=True, help='weights "a,b"')
    p.add_argument("--out", help="also write the certificate of the optimum here")
    p.add_argument("--approx", action="store_true", help="add a decimal annotation")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a certificate document")
    p.add_argument("path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="print a verified certificate")
    p.add_argument("path")
    p.add_argument("--format", choices=["table", "chain", "latex"], default="table")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("region", help="sweep the (M,R) region and enumerate its vertices")
    _add_model_args(p)
    p.add_argument("--builtin", choices=["theorem3x3"], help="use a built-in halfplane list")
    p.add_argument("--sweep", default="farey:4", help='"farey:N", "none" or "a,b;c,d" (default farey:4)')
    p.add_argument("--inner", help='also emit achievable points ("3x3")')
    p.add_argument("--out", help="output stem; writes STEM.csv and STEM.halfplanes")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("survey", help="report per preset which bounds are LP-provable")
    p.add_argument("--presets", help="comma-separated preset names (default: all)")
    p.add_argument("--ineq", action="append", help="inequality to attempt (repeatable)")
    p.add_argument("--symmetry", choices=["full", "stabilizer", "none"], default="full")
    p.add_argument("--cap", type=int, default=16)
    p.add_argument("--out", help="directory for the certificates found")
    p.set_defaults(func=cmd_survey)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except INPUT_ERRORS + (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CacheboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
