"""Command line: gen, run, bench, curve and verify-lemma."""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import pandas as pd

from .config import Defaults, Settings
from .core import parse_rational
from .engine import trace_to_jsonl
from .harness import GENERATORS, STRATEGIES, BenchHarness, StrategySpec, generate, render_table
from .restricted import Variant
from .scaled import ScaledMode

__all__ = ["build_parser", "main"]

logger = logging.getLogger(__name__)

EXIT_ERROR = 2


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def _add_strategy_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--strategy", choices=STRATEGIES, default="firstfit")
    parser.add_argument(
        "--variant",
        choices=["A", "Aprime", "combined"],
        help="advice strategy for cone-restricted input; overrides --strategy",
    )
    parser.add_argument("--cone-t", type=_rational, help="cone slope N/D; defaults to the instance's")
    parser.add_argument("--epsilon", type=_rational, default=Fraction(1, 2))
    parser.add_argument("--k", type=int, default=Defaults.desk_k, help="grid resolution of A_k")
    parser.add_argument("--mode", choices=[mode.value for mode in ScaledMode], default=ScaledMode.DESK.value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vecpack", description="Online vector packing with advice")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default="WARNING")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="write an instance (and its witness) as JSON")
    gen.add_argument("kind", choices=GENERATORS)
    gen.add_argument("--N", type=int, default=12, help="prefix length of the anyfit instance")
    gen.add_argument("--s", type=int, default=4, help="copies per class of the grid instances")
    gen.add_argument("--n", type=int, default=10, help="length of random instances")
    gen.add_argument("--k", type=int, default=Defaults.desk_k)
    gen.add_argument("--epsilon", type=_rational, default=Fraction(1, 1000))
    gen.add_argument("--delta", type=_rational, default=Fraction(1, 1000))
    gen.add_argument("--cone-t", type=_rational, default=Fraction(1))
    gen.add_argument("--seed", type=int, default=Defaults.seed)
    gen.add_argument("--out", type=Path, help="instance file; stdout if omitted")
    gen.add_argument("--witness-out", type=Path)

    run = commands.add_parser("run", help="run one strategy on one instance")
    run.add_argument("instance", type=Path)
    _add_strategy_options(run)
    run.add_argument("--witness", type=Path, help="witness used if exact search gives up")
    run.add_argument("--trace-out", type=Path, help="write the placement trace as JSON lines")
    run.add_argument("--tape-out", type=Path, help="write the advice tape the strategy read")
    run.add_argument("--audit-out", type=Path, help="write the bin types chosen by the scaled solver (A_k)")
    run.add_argument("--format", choices=["csv", "json"], default="json")

    bench = commands.add_parser("bench", help="run strategies on many instances")
    bench.add_argument("instances", type=Path, nargs="+")
    bench.add_argument("--strategy", choices=STRATEGIES, action="append", dest="strategies")
    bench.add_argument("--cone-t", type=_rational)
    bench.add_argument("--epsilon", type=_rational, default=Fraction(1, 2))
    bench.add_argument("--k", type=int, default=Defaults.desk_k)
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--omit-timing", action="store_true", help="leave wall times blank for byte-stable output")
    bench.add_argument("--format", choices=["csv", "json"], default="csv")

    curve = commands.add_parser("curve", help="tabulate competitive ratio bounds over cone slopes")
    curve.add_argument("--t", type=_rational, action="append", dest="t_values", help="slope to include; repeatable")
    curve.add_argument("--steps", type=int, default=Defaults.curve_steps)
    curve.add_argument("--epsilon", type=_rational, default=Fraction(0))
    curve.add_argument("--variant", choices=["A", "Aprime", "combined", "all"], default="all")
    curve.add_argument("--format", choices=["csv", "json"], default="csv")

    lemma = commands.add_parser("verify-lemma", help="repack random long-vector bins into two and a half bins")
    lemma.add_argument("--k", type=int, action="append", dest="k_values")
    lemma.add_argument("--samples", type=int, default=Defaults.lemma_samples)
    lemma.add_argument("--seed", type=int, default=Defaults.seed)
    lemma.add_argument("--format", choices=["csv", "json"], default="csv")

    return parser


def _spec_from_args(args: argparse.Namespace) -> StrategySpec:
    return StrategySpec(
        name=args.variant or args.strategy,
        cone_t=args.cone_t,
        epsilon=args.epsilon,
        k=args.k,
        mode=ScaledMode(args.mode),
    )


def _cmd_gen(args: argparse.Namespace, harness: BenchHarness) -> str:
    instance = generate(
        args.kind,
        N=args.N,
        s=args.s,
        n=args.n,
        k=args.k,
        epsilon=args.epsilon,
        delta=args.delta,
        cone_t=args.cone_t,
        seed=args.seed,
    )
    payload = instance.to_instance_file().model_dump_json() + "\n"
    if args.witness_out is not None:
        witness = instance.to_witness_file()
        if witness is None:
            raise ValueError(f"Generator {args.kind} has no witness")
        args.witness_out.write_text(witness.model_dump_json() + "\n")
    if args.out is not None:
        args.out.write_text(payload)
        return ""
    return payload


def _cmd_run(args: argparse.Namespace, harness: BenchHarness) -> str:
    report, row = harness.cmd_run(args.instance, _spec_from_args(args), args.witness)
    if args.trace_out is not None:
        args.trace_out.write_text(trace_to_jsonl(report.trace))
    if args.tape_out is not None:
        if report.advice is None:
            raise ValueError(f"{report.strategy} reads no advice tape")
        args.tape_out.write_text(report.advice.to_container().model_dump_json() + "\n")
    if args.audit_out is not None:
        if report.audit is None:
            raise ValueError(f"{report.strategy} has no solver audit")
        args.audit_out.write_text(report.audit.model_dump_json() + "\n")
    if args.format == "json":
        return row.model_dump_json() + "\n"
    return render_table(pd.DataFrame([row.model_dump()]), "csv")


def _cmd_bench(args: argparse.Namespace, harness: BenchHarness) -> str:
    specs = [
        StrategySpec(name=name, cone_t=args.cone_t, epsilon=args.epsilon, k=args.k)
        for name in (args.strategies or ["firstfit"])
    ]
    frame = harness.cmd_bench(args.instances, specs, jobs=args.jobs, omit_timing=args.omit_timing)
    return render_table(frame, args.format)


def _cmd_curve(args: argparse.Namespace, harness: BenchHarness) -> str:
    variants = {
        "A": (Variant.A,),
        "Aprime": (Variant.A_PRIME,),
        "combined": (),
        "all": (Variant.A, Variant.A_PRIME),
    }[args.variant]
    frame = harness.cmd_curve(args.t_values, args.epsilon, variants, args.steps)
    return render_table(frame, args.format)


def _cmd_verify_lemma(args: argparse.Namespace, harness: BenchHarness) -> str:
    k_values = args.k_values or [Defaults.desk_k, 2 * Defaults.desk_k]
    samples = {k: args.samples for k in k_values}
    frame = harness.cmd_verify_lemma(samples, args.seed)
    return render_table(frame, args.format)


COMMANDS = {
    "gen": _cmd_gen,
    "run": _cmd_run,
    "bench": _cmd_bench,
    "curve": _cmd_curve,
    "verify-lemma": _cmd_verify_lemma,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code.

    Failures are reported on stderr as a JSON object with the error type
    and message, and exit with code 2.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")

    try:
        harness = BenchHarness(Settings.from_env())
        output = COMMANDS[args.command](args, harness)
    except (ValueError, RuntimeError, OSError) as err:
        logger.debug("Command %s failed", args.command, exc_info=True)
        error = {"error": type(err).__name__, "message": str(err)}
        sys.stderr.write(json.dumps(error) + "\n")
        return EXIT_ERROR

    sys.stdout.write(output)
    return 0
