"""
Cartan Synthesis CLI
Command-line entry point: classification, exponential map, elasticae,
constants, cut-time tables, Engel comparison sweeps and shooting
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config import Config
from utils.analyzer import CutTimeAnalyzer, default_moduli
from utils.data_processor import TargetProcessor
from utils.errors import CartanError, DomainError, InputError
from utils.expmap import GroupPoint, trajectory
from utils.exporter import DataExporter
from utils.pendulum import Covector, classify, energy, modulus
from utils.shooting import SolverConfig, solve, solve_many

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_CONVERGENCE = 3
EXIT_INPUT = 4


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that raises InputError instead of exiting with status 2"""

    def error(self, message):
        raise InputError(message)


def _add_covector_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--theta", type=float, default=0.0, help="initial angle theta")
    parser.add_argument("--c", type=float, default=0.0, help="initial curvature c")
    parser.add_argument("--alpha", type=float, default=0.0, help="pendulum strength alpha >= 0")
    parser.add_argument("--beta", type=float, default=0.0, help="pendulum axis beta")


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(
        prog="cli.py",
        description="Optimal synthesis of the sub-Riemannian problem on the Cartan group",
    )
    parser.add_argument("--format", choices=["csv", "json"], default="csv", help="output format")
    parser.add_argument("--output", help="write output to PATH instead of stdout")
    parser.add_argument("--tol", type=float, default=None, help="integrator tolerance (default CARTAN_TOL)")
    parser.add_argument("--seed", type=int, default=None, help="seed for sampled sweeps (default CARTAN_SEED)")
    parser.add_argument("--workers", type=int, default=None, help="process workers, 0 = one per core")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG level")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="log errors only")

    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("classify", help="stratum, energy and modulus of a covector")
    _add_covector_arguments(p)
    p.add_argument("--stratum-tol", type=float, default=None, help="band width of the thin strata")
    p.set_defaults(handler=cmd_classify)

    p = commands.add_parser("exp", help="sampled extremal trajectory")
    _add_covector_arguments(p)
    p.add_argument("--t", type=float, required=True, help="final time t > 0")
    p.add_argument("--samples", type=int, default=Config.TRAJECTORY_SAMPLES)
    p.set_defaults(handler=cmd_exp)

    p = commands.add_parser("elastica", help="normalized elasticae up to their cut times")
    p.add_argument("--k", type=float, nargs="+", default=[0.3, 0.6, 0.9], help="moduli in (0, 1)")
    p.add_argument("--samples", type=int, default=Config.TRAJECTORY_SAMPLES)
    p.set_defaults(handler=cmd_elastica)

    p = commands.add_parser("constants", help="k0, k1, t1z(0), t2v(0) and zeta")
    p.set_defaults(handler=cmd_constants)

    p = commands.add_parser("tables", help="normalized cut-time or Maxwell-time table")
    p.add_argument("--grid-size", type=int, default=Config.GRID_SIZE)
    p.add_argument("--table", choices=["cut", "maxwell"], default="cut")
    p.add_argument("--excel", nargs="?", const="", default=None, help="also write a workbook to PATH")
    p.set_defaults(handler=cmd_tables)

    p = commands.add_parser("compare", help="Engel/Cartan cut times of random covectors")
    p.add_argument("--count", type=int, default=300)
    p.set_defaults(handler=cmd_compare)

    p = commands.add_parser("shoot", help="minimizer and distance from the identity to a target")
    for name in Config.REQUIRED_COLUMNS:
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--input", help="batch of targets (.csv or .xlsx)")
    p.add_argument("--shoot-tol", type=float, default=Config.SHOOT_TOL)
    p.add_argument("--max-starts", type=int, default=Config.MAX_STARTS)
    p.set_defaults(handler=cmd_shoot)

    return parser


def _covector(args) -> Covector:
    return Covector(args.theta, args.c, args.alpha, args.beta)


def cmd_classify(args, exporter: DataExporter) -> str:
    covector = _covector(args)
    stratum = classify(covector, args.stratum_tol)
    k = modulus(covector, stratum).k if stratum.value in ("C1", "C2", "C3") else None
    return exporter.render({"stratum": stratum.value, "E": energy(covector), "k": k}, args.format)


def cmd_exp(args, exporter: DataExporter) -> str:
    frame = trajectory(_covector(args), args.t, args.samples, Config.TOL).to_frame()
    return exporter.render(frame, args.format)


def cmd_elastica(args, exporter: DataExporter) -> str:
    frame = CutTimeAnalyzer(ks=[], workers=args.workers).get_elastica_family(args.k, args.samples)
    return exporter.render(frame, args.format)


def cmd_constants(args, exporter: DataExporter) -> str:
    return exporter.render(CutTimeAnalyzer(ks=[]).get_summary_stats(), args.format)


def cmd_tables(args, exporter: DataExporter) -> str:
    analyzer = CutTimeAnalyzer(default_moduli(args.grid_size), workers=args.workers)
    exporter.analyzer = analyzer
    for message in analyzer.detect_anomalies():
        logger.warning(message)

    if args.excel is not None:
        path = Path(args.excel or exporter.get_filename("xlsx"))
        path.write_bytes(exporter.export_to_excel().getvalue())
        logger.info("workbook written to %s", path)

    table = analyzer.get_cut_time_table() if args.table == "cut" else analyzer.get_maxwell_table()
    return exporter.render(table, args.format)


def cmd_compare(args, exporter: DataExporter) -> str:
    frame = CutTimeAnalyzer(ks=[]).run_comparison_sweep(args.count, Config.SEED)
    return exporter.render(frame, args.format)


def cmd_shoot(args, exporter: DataExporter) -> str:
    cfg = SolverConfig(tol=args.shoot_tol, max_starts=args.max_starts)

    if args.input:
        targets, _ = TargetProcessor().process_file(args.input)
        return exporter.render(solve_many(targets, cfg, args.workers), args.format)

    values = [getattr(args, name) for name in Config.REQUIRED_COLUMNS]
    if any(value is None for value in values):
        raise InputError("shoot needs --x --y --z --v --w or --input PATH")
    record = solve(GroupPoint(*values), cfg).to_dict()
    if args.format == "csv":
        record["flags"] = "; ".join(record["flags"])
    return exporter.render(record, args.format)


def configure_logging(args):
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.ERROR
    else:
        level = getattr(logging, str(Config.LOG_LEVEL).upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _apply_overrides(args):
    # Command-line values take precedence over the environment
    if args.tol is not None:
        if not args.tol > 0.0:
            raise InputError(f"--tol must be positive, got {args.tol}")
        Config.TOL = args.tol
    if args.seed is not None:
        Config.SEED = args.seed
    if args.workers is not None:
        Config.WORKERS = args.workers


def _exit_code(error: CartanError) -> int:
    if isinstance(error, InputError):
        return EXIT_INPUT
    if isinstance(error, DomainError):
        return EXIT_DOMAIN
    # ConvergenceError, NoRootError and ViolationError are numerical failures
    return EXIT_CONVERGENCE


def _emit_error(error: Exception):
    payload = {"error": type(error).__name__, "message": str(error)}
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        configure_logging(args)
        _apply_overrides(args)
    except InputError as error:
        _emit_error(error)
        return EXIT_INPUT

    exporter = DataExporter()
    try:
        text = args.handler(args, exporter)
    except CartanError as error:
        logger.error("%s: %s", type(error).__name__, error)
        _emit_error(error)
        return _exit_code(error)

    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
