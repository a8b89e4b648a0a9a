"""Command line: `threepoint <subcommand> ...`.

Exit codes: 0 success (every requested check passed), 1 a check failed or a
result contradicted a proven bound, 2 usage or validation error. Machine
readable results go to stdout, logging to stderr.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from typing import Callable, List, Optional, Sequence

from src.threepoint.certify import (
    CHECKS,
    PackingMode,
    check_identity_rosen,
    check_identity_uvt,
    check_packing,
    classify_orthonormal_basis,
    classify_two_bases,
    psd_check,
    run_checks,
)
from src.threepoint.construct import SHAPES, LiftSpec, gen_random, gen_two_bases, lift
from src.threepoint.data import (
    DEFAULT_MAX_ITERS,
    DEFAULT_PACKING_EPS,
    DEFAULT_PSD_CHECK_SIZE,
    DEFAULT_RESTARTS,
    STRUCTURE_TOL,
    default_threads,
)
from src.threepoint.energy import mc_energy, three_point_energy
from src.threepoint.errors import TheoremViolation, ThreePointError
from src.threepoint.io import (
    RunManifest,
    export_report,
    format_report_table,
    load_kernel,
    read_config,
    write_config,
    write_manifest,
)
from src.threepoint.optimize import OptimizerSettings, minimize_energy, search_packing

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def _finish(manifest: RunManifest, out: Optional[str]) -> None:
    if out:
        manifest.add_output(out)
        write_manifest(manifest, out)


def cmd_gen(args: argparse.Namespace, manifest: RunManifest) -> int:
    if args.shape == "two-bases":
        cfg = gen_two_bases(args.theta, args.lam)
    elif args.shape == "random":
        if args.n_points is None:
            raise argparse.ArgumentTypeError("--n-points is required for --shape random")
        manifest.seeds.append(args.seed)
        cfg = gen_random(args.dim, args.n_points, args.seed, args.random_weights)
    else:
        cfg = SHAPES[args.shape](args.dim)
    write_config(cfg, args.out)
    _finish(manifest, args.out)
    print(f"{args.shape}: {cfg.n_points} points on S^{cfg.dim - 1} -> {args.out}")
    return EXIT_OK


def cmd_lift(args: argparse.Namespace, manifest: RunManifest) -> int:
    cfg = read_config(args.config)
    manifest.add_input(args.config)
    lifted = lift(LiftSpec(cfg))
    write_config(lifted, args.out)
    _finish(manifest, args.out)
    print(f"lifted {cfg.n_points} points from S^{cfg.dim - 1} to S^{lifted.dim - 1} -> {args.out}")
    return EXIT_OK


def cmd_energy(args: argparse.Namespace, manifest: RunManifest) -> int:
    cfg = read_config(args.config)
    manifest.add_input(args.config)
    kernel = load_kernel(args.kernel, cfg.dim)
    report = three_point_energy(cfg, kernel, breakdown=args.breakdown, threads=args.threads)
    print(f"{report.value:.17g}")
    if report.breakdown is not None:
        for name, value in report.breakdown.items():
            print(f"  {name}: {value:.17g}")
    if args.out:
        export_report(report, "json", args.out)
    _finish(manifest, args.out)
    return EXIT_OK


def cmd_certify(args: argparse.Namespace, manifest: RunManifest) -> int:
    cfg = read_config(args.config)
    manifest.add_input(args.config)
    reports = run_checks(cfg, args.checks.split(","), tol=args.tol, eps=args.eps)
    print(format_report_table(reports))
    if args.json:
        export_report(reports, "json", args.json)
        _finish(manifest, args.json)
    if args.csv:
        export_report(reports, "csv", args.csv)
        _finish(manifest, args.csv)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_optimize(args: argparse.Namespace, manifest: RunManifest) -> int:
    kernel = load_kernel(args.kernel, args.dim)
    settings = OptimizerSettings(
        dim=args.dim,
        n_points=args.n_points,
        kernel=kernel,
        optimize_weights=args.weights,
        restarts=args.restarts,
        max_iters=args.max_iters,
        seed=args.seed,
        threads=args.threads,
    )
    manifest.seeds.append(args.seed)
    result = minimize_energy(settings)
    print(f"best energy: {result.best_energy:.17g} (converged: {result.converged})")
    if args.out:
        export_report(result, "json", args.out)
        _finish(manifest, args.out)
    if args.trace_csv:
        export_report(result, "csv", args.trace_csv)
        _finish(manifest, args.trace_csv)
    return EXIT_OK


def cmd_pack_search(args: argparse.Namespace, manifest: RunManifest) -> int:
    manifest.seeds.append(args.seed)
    result = search_packing(
        args.dim,
        args.n_points,
        restarts=args.restarts,
        seed=args.seed,
        strict=args.strict,
        eps=args.eps,
        max_iters=args.max_iters,
        threads=args.threads,
    )
    status = "meets" if result.passed else "misses"
    print(
        f"minimax triple product: {result.minimax:.17g} ({status} the hypothesis, "
        f"bound N <= {result.bound})"
    )
    if args.out:
        export_report(result, "json", args.out)
        _finish(manifest, args.out)
    return EXIT_OK


def cmd_mc(args: argparse.Namespace, manifest: RunManifest) -> int:
    kernel = load_kernel(args.kernel, args.dim)
    manifest.seeds.append(args.seed)
    estimate = mc_energy(args.dim, kernel, args.samples, args.seed)
    print(f"{estimate.mean:.17g} +/- {estimate.std_error:.3g}")
    if args.out:
        export_report(estimate, "json", args.out)
        _finish(manifest, args.out)
    return EXIT_OK


def cmd_psd_check(args: argparse.Namespace, manifest: RunManifest) -> int:
    cfg = read_config(args.config)
    manifest.add_input(args.config)
    report = psd_check(cfg, args.m_max, args.size)
    print(format_report_table([report]))
    if args.json:
        export_report(report, "json", args.json)
        _finish(manifest, args.json)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_identity_check(args: argparse.Namespace, manifest: RunManifest) -> int:
    manifest.seeds.append(args.seed)
    reports = [
        check_identity_rosen(args.dim, args.samples, args.seed),
        check_identity_uvt(args.dim, args.samples, args.seed),
    ]
    print(format_report_table(reports))
    if args.json:
        export_report(reports, "json", args.json)
        _finish(manifest, args.json)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_classify(args: argparse.Namespace, manifest: RunManifest) -> int:
    cfg = read_config(args.config)
    manifest.add_input(args.config)
    reports = [
        classify_orthonormal_basis(cfg, args.tol),
        classify_two_bases(cfg, args.tol),
        check_packing(cfg).as_cert_report(),
    ]
    strict = check_packing(cfg, PackingMode.STRICT, eps=args.eps)
    reports.append(strict.as_cert_report())
    print(format_report_table(reports))
    matches = [r.name for r in reports if r.passed and r.applicable]
    print("structure: " + (", ".join(matches) if matches else "none recognized"))
    return EXIT_OK


# =============================================================================
# PARSER
# =============================================================================

def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--threads",
        type=_positive_int,
        default=None,
        help="Worker threads (default: $THREEPOINT_THREADS or 1).",
    )
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="More logging on stderr (repeatable)."
    )

    parser = argparse.ArgumentParser(
        prog="threepoint",
        description="Three-point energies, certificates and optimizers on the unit sphere.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="<command>")

    p = sub.add_parser("gen", parents=[common], help="Write a canonical configuration.")
    p.add_argument("--shape", required=True, choices=[*SHAPES, "two-bases", "random"])
    p.add_argument("--dim", type=int, default=2, help="Ambient dimension d (default: 2).")
    p.add_argument("--theta", type=float, default=math.pi / 4, help="Second-basis rotation.")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5, help="First-basis weight.")
    p.add_argument("--n-points", dest="n_points", type=_positive_int, help="Random-shape size.")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-weights", action="store_true", help="Dirichlet weights.")
    p.add_argument("--out", required=True, help="Output JSON path.")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("lift", parents=[common], help="Lift a configuration from S^{d-1} to S^d.")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("energy", parents=[common], help="Discrete three-point energy.")
    p.add_argument("--config", required=True)
    p.add_argument("--kernel", required=True, help="Kernel JSON: a path or an inline object.")
    p.add_argument("--breakdown", action="store_true", help="Split by index-coincidence class.")
    p.add_argument("--out", help="Write the EnergyReport as JSON.")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("certify", parents=[common], help="Run named checks on a configuration.")
    p.add_argument("--config", required=True)
    p.add_argument(
        "--checks", default="all", help=f"Comma list of: {', '.join(CHECKS)}, or all (default)."
    )
    p.add_argument("--tol", type=float, default=None, help="Override every check's tolerance.")
    p.add_argument(
        "--eps",
        type=float,
        default=DEFAULT_PACKING_EPS,
        help="Margin of packing-strict: products must be <= -eps.",
    )
    p.add_argument("--json", help="Write the reports as a JSON array.")
    p.add_argument("--csv", help="Write the reports as CSV.")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("optimize", parents=[common], help="Minimize an energy over configurations.")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n-points", dest="n_points", type=_positive_int, required=True)
    p.add_argument("--kernel", default='{"kind": "pframe", "p": 1}')
    p.add_argument("--restarts", type=_positive_int, default=DEFAULT_RESTARTS)
    p.add_argument("--max-iters", dest="max_iters", type=_positive_int, default=DEFAULT_MAX_ITERS)
    p.add_argument("--weights", action="store_true", help="Optimize weights as well.")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="Write the OptimizerResult as JSON.")
    p.add_argument("--trace-csv", dest="trace_csv", help="Write the energy trace as CSV.")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("pack-search", parents=[common], help="Search for nonpositive-triple sets.")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n-points", dest="n_points", type=int, required=True)
    p.add_argument("--restarts", type=_positive_int, default=DEFAULT_RESTARTS)
    p.add_argument("--max-iters", dest="max_iters", type=_positive_int, default=DEFAULT_MAX_ITERS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--strict", action="store_true", help="Require products <= -eps (bound d + 1)."
    )
    p.add_argument("--eps", type=float, default=DEFAULT_PACKING_EPS, help="Strict margin.")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pack_search)

    p = sub.add_parser("mc", parents=[common], help="Monte-Carlo energy of the uniform measure.")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--samples", type=_positive_int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("psd-check", parents=[common], help="Eigenvalues of S-moment matrices.")
    p.add_argument("--config", required=True)
    p.add_argument("--m-max", dest="m_max", type=int, default=2)
    p.add_argument("--size", type=_positive_int, default=DEFAULT_PSD_CHECK_SIZE)
    p.add_argument("--json")
    p.set_defaults(func=cmd_psd_check)

    p = sub.add_parser("identity-check", parents=[common], help="Certificate identities.")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json")
    p.set_defaults(func=cmd_identity_check)

    p = sub.add_parser("classify", parents=[common], help="Recognize known optimal structures.")
    p.add_argument("--config", required=True)
    p.add_argument("--tol", type=float, default=STRUCTURE_TOL, help="Gram-matrix tolerance.")
    p.add_argument("--eps", type=float, default=DEFAULT_PACKING_EPS, help="Strict margin.")
    p.set_defaults(func=cmd_classify)

    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING - 10 * min(verbosity, 2)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def dispatch(argv: Sequence[str]) -> int:
    """Parse `argv`, run the subcommand and map the outcome to an exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    configure_logging(args.verbose)
    if args.threads is None:
        args.threads = default_threads()
    manifest = RunManifest.start(args.command, argv, threads=args.threads)
    handler: Callable[[argparse.Namespace, RunManifest], int] = args.func
    try:
        return handler(args, manifest)
    except TheoremViolation as exc:
        logger.critical("result contradicts a proven bound: %s", exc)
        print(f"THEOREM VIOLATION: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (ThreePointError, ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
