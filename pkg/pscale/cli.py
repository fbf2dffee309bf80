"""pscale command line: analyze, normalize, scale, limit, match.

Reports are JSON on stdout (or --output). Exit codes: 0 ok, 1 input error,
2 hypothesis failure, 3 non-convergence.
"""
import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from .config import JMAX, LIMIT_TOL, MATCH_TOL, SUBHARMONIC_SAMPLES, WINDOW
from .cpoly import parse_poly
from .domain import (
    DomainSpec,
    dangelo_type_z1,
    levi_rank_corank,
    pseudoconvexity_sample,
    strongly_pseudoconvex_at_origin,
    validate_normal_form,
)
from .errors import BoundaryError, HypothesisError, NonConvergenceError, ParseError, PscaleError
from .expr import parse_number, parse_point
from .limits import SequenceSpec, domain_convergence_probe, limit_polynomial
from .models import match_top_homogeneous
from .normalize import lift_to_boundary, normalize_at
from .report import analyze_report, dumps, limit_report, match_report, normalize_report, scaling_report
from .scaling import check_q_estimate, rescaled_rho
from .schema import PolyFile, RunConfig

logger = logging.getLogger("pscale")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_HYPOTHESIS = 2
EXIT_NONCONVERGENCE = 3


def _load_json(path: str) -> Dict[str, Any]:
    with Path(path).open("r", encoding="utf-8") as handle:
        payload = json.load(handle)
    if not isinstance(payload, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return payload


def _load_domain(path: str) -> DomainSpec:
    return DomainSpec.from_json(_load_json(path))


def _scalar(text: str) -> Fraction:
    text = text.strip()
    sign = -1 if text.startswith("-") else 1
    try:
        return sign * parse_number(text.lstrip("+-"))
    except (ValueError, ZeroDivisionError) as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError(f"invalid number {text!r}") from e


def _emit(payload, output: Optional[str]) -> None:
    text = dumps(payload)
    if output:
        Path(output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        tol=args.tol,
        jmax=args.jmax if args.jmax is not None else JMAX,
        window=args.window,
        samples=args.samples,
        output=args.output,
    ).checked()


def _boundary_and_epsilon(spec: DomainSpec, point):
    "A boundary point is used as is with epsilon 0; an interior one is lifted"
    if len(point) != spec.n:
        raise BoundaryError(f"point has {len(point)} coordinates, expected {spec.n}")
    if spec.defining_value_exact(point) == 0:
        return point, Fraction(0)
    return lift_to_boundary(spec, point)


def cmd_analyze(args: argparse.Namespace) -> int:
    spec = _load_domain(args.domain)
    normal_form = validate_normal_form(spec)
    rank, corank = levi_rank_corank(spec)
    strongly = strongly_pseudoconvex_at_origin(spec)
    psc = pseudoconvexity_sample(spec, count=args.samples)
    try:
        certificate = dangelo_type_z1(spec)
    except HypothesisError:
        logger.exception("dangelo_type_z1")
        certificate = None
    hypotheses = (
        certificate is not None
        and certificate.certified
        and normal_form.passed
        and corank <= 1
        and psc.passed
    )
    _emit(
        analyze_report(spec, normal_form, rank, corank, strongly, psc, certificate, hypotheses),
        args.output,
    )
    return EXIT_OK if hypotheses else EXIT_HYPOTHESIS


def cmd_normalize(args: argparse.Namespace) -> int:
    spec = _load_domain(args.domain)
    eta_prime, epsilon = _boundary_and_epsilon(spec, parse_point(args.point))
    norm = normalize_at(spec, eta_prime)
    _emit(normalize_report(epsilon, norm), args.output)
    return EXIT_OK


def cmd_scale(args: argparse.Namespace) -> int:
    spec = _load_domain(args.domain)
    point = parse_point(args.point)
    if args.epsilon is not None:
        eta_prime, epsilon = point, _scalar(args.epsilon)
    else:
        eta_prime, epsilon = lift_to_boundary(spec, point)
    norm = normalize_at(spec, eta_prime)
    sd = rescaled_rho(spec, norm, epsilon)
    q = check_q_estimate(sd, samples=args.samples)
    _emit(scaling_report(sd, q), args.output)
    return EXIT_OK


def cmd_limit(args: argparse.Namespace) -> int:
    config = _run_config(args)
    spec = _load_domain(args.domain)
    seq = SequenceSpec.from_json(_load_json(args.sequence), jmax=args.jmax)
    if seq.jmax < config.window:
        raise ParseError(f"jmax ({seq.jmax}) must be >= window ({config.window})")
    report = limit_polynomial(spec, seq, config.tol, config.window, config.samples)
    probe = None
    if args.probe:
        probe = domain_convergence_probe(spec, seq, report.P_limit, window=config.window)
    print(report.summary(spec.n), file=sys.stderr)
    _emit(limit_report(report, spec.n, probe), config.output)
    if not report.converged:
        raise NonConvergenceError(report)
    return EXIT_OK


def _load_poly(path: str):
    f = PolyFile.from_dict(_load_json(path))
    return parse_poly(f.P, f.nvars)


def cmd_match(args: argparse.Namespace) -> int:
    Q = _load_poly(args.P)
    H = _load_poly(args.H)
    _emit(match_report(match_top_homogeneous(Q, H, args.tol)), args.output)
    return EXIT_OK


def register_commands(sub: argparse._SubParsersAction) -> None:
    def output(cmd: argparse.ArgumentParser) -> None:
        cmd.add_argument("--output", "-o", default=None, help="Write the JSON report to this path")

    analyze = sub.add_parser("analyze", help="Check the hypotheses at the origin of a domain")
    analyze.add_argument("domain")
    analyze.add_argument("--samples", type=int, default=1000, help="Boundary samples for the Levi form")
    output(analyze)
    analyze.set_defaults(func=cmd_analyze)

    normalize = sub.add_parser("normalize", help="Normal form coordinates at a boundary point")
    normalize.add_argument("domain")
    normalize.add_argument("--point", required=True, help='"re,im;re,im;..." with exact rationals')
    output(normalize)
    normalize.set_defaults(func=cmd_normalize)

    scale = sub.add_parser("scale", help="Rescaled defining function at one point")
    scale.add_argument("domain")
    scale.add_argument("--point", required=True, help="Interior point, or boundary point with --epsilon")
    scale.add_argument("--epsilon", default=None)
    scale.add_argument("--samples", type=int, default=512, help="Disc samples for the Q estimate")
    output(scale)
    scale.set_defaults(func=cmd_scale)

    limit = sub.add_parser("limit", help="Limit model along an interior sequence")
    limit.add_argument("domain")
    limit.add_argument("sequence")
    limit.add_argument("--tol", type=float, default=LIMIT_TOL)
    limit.add_argument("--jmax", type=int, default=None, help=f"Sequence length (default {JMAX})")
    limit.add_argument("--window", type=int, default=WINDOW)
    limit.add_argument("--samples", type=int, default=SUBHARMONIC_SAMPLES)
    limit.add_argument("--probe", action="store_true", help="Also sample domain convergence")
    output(limit)
    limit.set_defaults(func=cmd_limit)

    match = sub.add_parser("match", help="Match the top homogeneous part of P against H")
    match.add_argument("P")
    match.add_argument("H")
    match.add_argument("--tol", type=float, default=MATCH_TOL)
    output(match)
    match.set_defaults(func=cmd_match)


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="pscale", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    register_commands(sub)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except NonConvergenceError:
        return EXIT_NONCONVERGENCE
    except HypothesisError as e:
        print(f"pscale: hypothesis failure: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (PscaleError, ValueError, OSError) as e:
        # json.JSONDecodeError is a ValueError
        print(f"pscale: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
