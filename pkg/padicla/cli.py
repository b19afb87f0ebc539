# padicla/cli.py
"""
Command-line front end.

    padicla ring EXPR [--ring series|witt]
    padicla mahler {coeffs,eval,check,restrict} [EXPR | --input FILE]
    padicla witness EXPR [--ring series|witt]
    padicla experiment {decompletion,witt-la,counterexample,tatesen,coboundary}

Exit codes: 0 success, 1 property failure, 2 usage or parse error,
3 precision exhaustion. Failures are written to stderr as one JSON record.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from padicla import __version__
from padicla.config import RunConfig
from padicla.errors import PadicError, PropertyFailure, UsageError
from padicla.logging_config import set_run_id
from padicla.mahler import (
    MahlerFn,
    as_oracle,
    best_mu,
    check_cond1,
    check_cond2,
    evaluate,
    from_text,
    mahler_coeffs,
    restrict,
    restriction_level,
    to_text,
)
from padicla.modules import SeriesModule, WittModule, make_module
from padicla.parser import make_ring, parse_ring_expr, polynomial_oracle
from padicla.services.experiments import EXPERIMENTS, render, run_experiment, write_report
from padicla.services.group import witness_search
from padicla.utils import SCHEMA_TAG, dumps_json, fmt_rational, parse_rational, write_text
from padicla.witt import WittElem

logger = logging.getLogger(__name__)

# RunConfig fields settable from flags
_CONFIG_FLAGS = ("prime", "cap", "witt_length", "degree", "lambda_grid", "levels", "seed", "samples", "witt_r", "format", "out")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("run configuration")
    group.add_argument("--config", help="key = value config file; flags override it")
    group.add_argument("--prime", type=int, help="the prime p")
    group.add_argument("--cap", type=int, help="X-adic cap of series elements")
    group.add_argument("--witt-length", type=int, help="Witt length n")
    group.add_argument("--degree", type=int, help="Mahler degree bound N")
    group.add_argument("--lambda-grid", help="comma-separated radii, e.g. '2,1,1/2,0'")
    group.add_argument("--levels", help="comma-separated group levels")
    group.add_argument("--seed", type=int, help="seed of every random draw")
    group.add_argument("--samples", type=int, help="random samples per experiment cell")
    group.add_argument("--witt-r", help="r in val_r")
    group.add_argument("--format", choices=["json", "csv", "text"], help="output format")
    group.add_argument("--out", help="output path (a prefix for experiments)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="padicla", description="Locally analytic vectors at desk scale.")
    parser.add_argument("--version", action="version", version=f"padicla {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    ring = commands.add_parser("ring", parents=[common], help="evaluate a ring expression")
    ring.add_argument("expr", help="e.g. 'gamma(3, X) - X' or 'T mod p'")
    ring.add_argument("--ring", choices=["series", "witt"], default="series")
    ring.set_defaults(handler=cmd_ring)

    mahler = commands.add_parser("mahler", parents=[common], help="Mahler expansions")
    mahler.add_argument("action", choices=["coeffs", "eval", "check", "restrict"])
    mahler.add_argument("expr", nargs="?", help="integer-valued polynomial in x, y, z")
    mahler.add_argument("--input", help="stored coefficient file instead of EXPR")
    mahler.add_argument("--module", choices=["padic", "series", "witt"], default="padic", help="module of --input")
    mahler.add_argument("--dim", type=int, help="number of variables of EXPR")
    mahler.add_argument("--at", help="evaluation point, comma-separated")
    mahler.add_argument("--lam", help="radius lambda for check and restrict")
    mahler.add_argument("--mu", help="offset mu for check")
    mahler.add_argument("--level", type=int, help="restriction level l")
    mahler.add_argument("--lam-prime", help="target radius for restrict")
    mahler.set_defaults(handler=cmd_mahler)

    witness = commands.add_parser("witness", parents=[common], help="search an analyticity witness")
    witness.add_argument("expr")
    witness.add_argument("--ring", choices=["series", "witt"], default="series")
    witness.set_defaults(handler=cmd_witness)

    experiment = commands.add_parser("experiment", parents=[common], help="run a named experiment")
    experiment.add_argument("name", choices=sorted(EXPERIMENTS))
    experiment.set_defaults(handler=cmd_experiment)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {name: getattr(args, name, None) for name in _CONFIG_FLAGS}


def _emit(text: str, path: Optional[str] = None) -> None:
    if path:
        write_text(path, text)
    else:
        sys.stdout.write(text)


def _fail(record: Dict[str, Any]) -> None:
    sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")


# -- ring and witness -----------------------------------------------------------------------

def cmd_ring(args: argparse.Namespace, config: RunConfig) -> int:
    ring = make_ring(args.ring, config.prime, config.cap, config.witt_length)
    value = parse_ring_expr(args.expr, ring)
    if config.format != "text":
        payload = {"schema_tag": SCHEMA_TAG, "ring": args.ring, "expr": args.expr, "value": str(value)}
        _emit(dumps_json(payload), config.out)
    else:
        _emit(f"{value}\n", config.out)
    return 0


def cmd_witness(args: argparse.Namespace, config: RunConfig) -> int:
    ring = make_ring(args.ring, config.prime, config.cap, config.witt_length)
    value = parse_ring_expr(args.expr, ring)
    if args.ring == "witt" and isinstance(value, WittElem):
        module = WittModule(config.prime, config.witt_length, config.r, config.cap)
    else:
        module = SeriesModule(config.prime, config.cap)
    witness = witness_search(module, value, config.levels, config.lambdas, config.degree)
    record = witness.to_record()
    if config.format == "text":
        line = f"level={record.level} lambda={record.lam} mu={record.mu}" if record.found else "no witness"
        _emit(f"{line} (N={record.checked_up_to})\n", config.out)
    else:
        _emit(dumps_json({"schema_tag": SCHEMA_TAG, "expr": args.expr, **record.model_dump()}), config.out)
    return 0


# -- mahler -----------------------------------------------------------------------------------

def _load_function(args: argparse.Namespace, config: RunConfig) -> MahlerFn:
    if args.input:
        if args.expr:
            raise UsageError("give either EXPR or --input, not both")
        module = make_module(args.module, config.prime, config.cap, config.witt_length, config.r)
        return from_text(Path(args.input).read_text(encoding="utf-8"), module)
    if not args.expr:
        raise UsageError("mahler needs EXPR or --input")
    return mahler_coeffs(polynomial_oracle(args.expr, config.prime, args.dim), config.degree)


def _coefficient_payload(f: MahlerFn) -> Dict[str, Any]:
    return {
        "schema_tag": SCHEMA_TAG,
        "d": f.d,
        "degree": f.degree,
        "tail": str(f.tail),
        "heuristic_tail": f.heuristic_tail,
        "coefficients": {",".join(str(i) for i in n): f.module.fmt(a) for n, a in f.stored()},
    }


def _point(text: Optional[str], d: int) -> List[Any]:
    if not text:
        raise UsageError("eval needs --at")
    values = [parse_rational(part) for part in text.split(",")]
    if len(values) != d:
        raise UsageError(f"--at needs {d} coordinates")
    return [int(v) if v.denominator == 1 else v for v in values]


def _required(value: Optional[str], flag: str) -> Fraction:
    if value is None:
        raise UsageError(f"this action needs {flag}")
    return parse_rational(value)


def cmd_mahler(args: argparse.Namespace, config: RunConfig) -> int:
    f = _load_function(args, config)
    as_json = config.format != "text"
    if args.action == "coeffs":
        if args.input:
            f = mahler_coeffs(as_oracle(f), f.degree)
        _emit(dumps_json(_coefficient_payload(f)) if as_json else to_text(f), config.out)
    elif args.action == "eval":
        value = evaluate(f, _point(args.at, f.d))
        text = f.module.fmt(value)
        _emit(dumps_json({"schema_tag": SCHEMA_TAG, "at": args.at, "value": text}) if as_json else text + "\n", config.out)
    elif args.action == "check":
        lam, mu = _required(args.lam, "--lam"), _required(args.mu, "--mu")
        payload = {
            "schema_tag": SCHEMA_TAG,
            "lam": fmt_rational(lam),
            "mu": fmt_rational(mu),
            "cond1": check_cond1(f, lam, mu),
            "cond2": check_cond2(f, lam, mu),
            "best_mu": str(best_mu(f, lam)),
        }
        _emit(dumps_json(payload), config.out)
    else:
        if args.level is None and args.lam is not None and args.lam_prime is not None:
            level, _ = restriction_level(config.prime, parse_rational(args.lam), parse_rational(args.lam_prime))
        elif args.level is not None:
            level = args.level
        else:
            raise UsageError("restrict needs --level or both --lam and --lam-prime")
        lam = None if args.lam is None else parse_rational(args.lam)
        lam_prime = None if args.lam_prime is None else parse_rational(args.lam_prime)
        result = restrict(f, level, lam, lam_prime)
        if as_json:
            payload = _coefficient_payload(result.fn)
            payload.update(level=level, lam=fmt_rational(result.lam), lam_prime=fmt_rational(result.lam_prime))
            payload["mu_prime"] = None if result.mu_prime is None else str(result.mu_prime)
            _emit(dumps_json(payload), config.out)
        else:
            header = f"# restricted to level {level}\n"
            if result.mu_prime is not None:
                header += f"# lambda' = {fmt_rational(result.lam_prime)}, mu' = {result.mu_prime}\n"
            _emit(header + to_text(result.fn), config.out)
    return 0


# -- experiments --------------------------------------------------------------------------------

def cmd_experiment(args: argparse.Namespace, config: RunConfig) -> int:
    report = run_experiment(args.name, config)
    if config.out:
        for path in write_report(report, config.out):
            logger.info(f"Report written to {path}")
        sys.stdout.write(render(report, "text"))
    else:
        sys.stdout.write(render(report, config.format))
    if not report.passed:
        raise PropertyFailure(
            f"experiment {args.name} failed: {', '.join(report.failures)}",
            {"experiment": args.name, "failures": ",".join(report.failures)},
        )
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig.from_sources(args.config, _overrides(args))
    except (ValueError, OSError) as e:
        _fail({"error": type(e).__name__, "message": str(e), "exit_code": 2, "details": {}})
        return 2
    set_run_id(config.fingerprint())
    try:
        return args.handler(args, config)
    except PadicError as e:
        logger.debug(f"{type(e).__name__}: {e.message}")
        _fail(e.to_record())
        return e.exit_code
    except OSError as e:
        _fail({"error": type(e).__name__, "message": str(e), "exit_code": 2, "details": {}})
        return 2
