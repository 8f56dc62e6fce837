"""Run strategies on instances and tabulate bin counts, ratios and bound curves."""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Literal, Optional, Sequence

import pandas as pd

from ._compat import format_fixed
from .advice import AdviceTape, write_tape
from .advice.oracle import oracle_restricted, oracle_scaled
from .config import Defaults, Settings
from .core import ConeParams, Packing, Vec2, opt_load_lower_bound
from .engine import BestFit, FirstFit, NextFit, OnlineStrategy, RunReport, run_online
from .exact import BudgetExhaustedError, exact_opt
from .generators import (
    GeneratedInstance,
    anyfit_lower_bound_instance,
    even_k_tightness,
    odd_k_adversary,
    random_box_instance,
    random_cone_instance,
    random_long_vector_bin,
)
from .restricted import AGammaStrategy, Variant, bound_formula, combined_bound, combined_dispatch, make_params
from .scaled import AkStrategy, ScaledMode, ScaledParams, overflow_bin_bound, repack_two_and_half
from .schemas import BenchRow, InstanceFile, WitnessFile

__all__ = [
    "STRATEGIES",
    "GENERATORS",
    "StrategySpec",
    "BenchHarness",
    "make_strategy",
    "strategy_bound",
    "within_bound",
    "generate",
    "render_table",
]

logger = logging.getLogger(__name__)

STRATEGIES = ("firstfit", "bestfit", "nextfit", "A", "Aprime", "combined", "Ak")
GENERATORS = ("anyfit", "even-k", "odd-k", "random-cone", "random-box")

# Reference lines of the curve table: the FirstFit upper bound and the
# AnyFit lower bound for two-dimensional vectors.
FIRSTFIT_REFERENCE = Fraction(27, 10)
ANYFIT_LOWER_BOUND = Fraction(11, 5)

OptKind = Literal["exact", "witness", "load_bound"]


@dataclass(frozen=True)
class StrategySpec:
    name: str
    cone_t: Fraction | None = None
    epsilon: Fraction = Fraction(1, 2)
    k: int = Defaults.desk_k
    mode: ScaledMode = ScaledMode.DESK

    def __post_init__(self):
        if self.name not in STRATEGIES:
            raise ValueError(f"Unknown strategy {self.name!r}, expected one of {', '.join(STRATEGIES)}")

    @property
    def needs_cone(self) -> bool:
        return self.name in ("A", "Aprime", "combined")


def make_strategy(
    spec: StrategySpec,
    sigma: Sequence[Vec2],
    settings: Optional[Settings] = None,
) -> OnlineStrategy:
    """Build a strategy; advice strategies get a tape written by their oracle over ``sigma``."""
    settings = settings or Settings()
    if spec.needs_cone and spec.cone_t is None:
        raise ValueError(f"Strategy {spec.name} needs a cone slope")
    if spec.name == "firstfit":
        return FirstFit()
    if spec.name == "bestfit":
        return BestFit()
    if spec.name == "nextfit":
        return NextFit()

    if spec.name == "combined":
        choice = combined_dispatch(spec.cone_t, spec.epsilon, spec.k)
        logger.debug("Combined strategy at t=%s dispatches to %s", spec.cone_t, choice.strategy)
        if choice.restricted is None:
            return make_strategy(replace(spec, name="Ak"), sigma, settings)
        return make_strategy(replace(spec, name="A"), sigma, settings)

    if spec.name in ("A", "Aprime"):
        params = make_params(spec.cone_t, spec.epsilon, Variant(spec.name))
        tape = AdviceTape(write_tape(oracle_restricted(sigma, params)))
        return AGammaStrategy(params, tape)

    params = ScaledParams(spec.k, spec.mode)
    tape = AdviceTape(write_tape(oracle_scaled(sigma, params.k, params.mode)))
    return AkStrategy(params, tape, state_limit=settings.dp_state_limit)


def strategy_bound(spec: StrategySpec) -> Fraction | None:
    """Competitive ratio guaranteed for the strategy, if it has one."""
    if spec.needs_cone and spec.cone_t is None:
        return None
    if spec.name == "A":
        return bound_formula(Variant.A, spec.cone_t, spec.epsilon)
    if spec.name == "Aprime":
        return bound_formula(Variant.A_PRIME, spec.cone_t, spec.epsilon)
    if spec.name == "combined":
        return combined_bound(spec.cone_t, spec.epsilon)
    if spec.name == "Ak":
        return Fraction(5, 2)
    return None


def within_bound(spec: StrategySpec, report: RunReport, opt: int) -> bool | None:
    """Check a run against its strategy's guarantee, given an exact optimum.

    Runs are held to ``c * opt + 1``. Below the theory grid, A_k runs that
    needed overflow bins are held to the overflow bin bound instead.
    """
    bound = strategy_bound(spec)
    if bound is None:
        return None
    limit = bound * opt + 1
    if report.strategy == AkStrategy.name and spec.mode is not ScaledMode.THEORY and report.kind_counts.get("overflow"):
        if spec.k < Defaults.desk_k:
            return None
        limit = max(limit, overflow_bin_bound(opt, spec.k) + 1)
    return report.bins_used <= limit


def generate(kind: str, **options) -> GeneratedInstance:
    """Dispatch to an instance generator by its command-line name."""
    builders = {
        "anyfit": lambda: anyfit_lower_bound_instance(
            options.get("N", 12), options.get("epsilon", Fraction(1, 1000)), options.get("delta", Fraction(1, 1000))
        ),
        "even-k": lambda: even_k_tightness(
            options.get("s", 4), options.get("k", Defaults.desk_k), options.get("epsilon", Fraction(1, 1000))
        ),
        "odd-k": lambda: odd_k_adversary(
            options.get("s", 10), options.get("k", 99), options.get("epsilon", Fraction(1, 1000))
        ),
        "random-cone": lambda: random_cone_instance(
            options.get("n", 10), options.get("cone_t", Fraction(1)), options.get("seed", Defaults.seed)
        ),
        "random-box": lambda: random_box_instance(options.get("n", 10), options.get("seed", Defaults.seed)),
    }
    if kind not in builders:
        raise ValueError(f"Unknown generator {kind!r}, expected one of {', '.join(GENERATORS)}")
    return builders[kind]()


def _six(value: Fraction) -> str:
    return format_fixed(value, 6)


def render_table(frame: pd.DataFrame, fmt: Literal["csv", "json"]) -> str:
    if fmt == "csv":
        return frame.to_csv(index=False)
    if fmt == "json":
        return frame.to_json(orient="records") + "\n"
    raise ValueError(f"Unknown output format {fmt!r}")


def _bench_task(task: tuple[str, str, StrategySpec, Optional[str], Settings, bool]) -> dict:
    instance_id, instance_raw, spec, witness_raw, settings, omit_timing = task
    harness = BenchHarness(settings)
    instance = InstanceFile.validate(instance_raw)
    witness = None if witness_raw is None else WitnessFile.validate(witness_raw).to_packing()
    _, row = harness.run(instance_id, instance.to_vectors(), spec, witness, omit_timing=omit_timing)
    return row.model_dump()


class BenchHarness:
    """Runs strategies against exact optima or their fallbacks."""

    def __init__(self, settings: Optional[Settings] = None):
        """Initialize the harness.

        Args:
            settings: Solver settings. If None, reads them from the environment.
        """
        self.settings = settings or Settings.from_env()

    def solve_opt(self, sigma: Sequence[Vec2], witness: Packing | None = None) -> tuple[int, OptKind]:
        """Exact optimum, else the witness size, else the load lower bound."""
        try:
            return exact_opt(sigma, self.settings.node_budget).opt, "exact"
        except BudgetExhaustedError:
            if witness is not None:
                return len(witness.bins), "witness"
            return opt_load_lower_bound(sigma), "load_bound"

    def run(
        self,
        instance_id: str,
        sigma: Sequence[Vec2],
        spec: StrategySpec,
        witness: Packing | None = None,
        omit_timing: bool = False,
    ) -> tuple[RunReport, BenchRow]:
        started = time.perf_counter()
        strategy = make_strategy(spec, sigma, self.settings)
        report = run_online(strategy, sigma)
        elapsed = time.perf_counter() - started

        opt, opt_kind = self.solve_opt(sigma, witness)
        if opt:
            ratio = Fraction(report.bins_used, opt)
        else:
            ratio = Fraction(1)
        bound = strategy_bound(spec)
        met = within_bound(spec, report, opt) if opt_kind == "exact" else None
        if met is False:
            logger.warning(
                "%s on %s used %d bins, above the bound %s for opt %d",
                spec.name, instance_id, report.bins_used, bound, opt,
            )
        row = BenchRow(
            instance_id=instance_id,
            strategy=spec.name,
            dispatched=report.strategy,
            bins=report.bins_used,
            opt=opt,
            opt_kind=opt_kind,
            ratio=ratio,
            bound=bound,
            within_bound=met,
            advice_bits=report.advice_bits_read,
            wall_time_s=None if omit_timing else round(elapsed, 6),
        )
        logger.info("%s on %s: %d bins, opt %d (%s)", report.strategy, instance_id, row.bins, opt, opt_kind)
        return report, row

    def cmd_run(
        self,
        instance_path: Path,
        spec: StrategySpec,
        witness_path: Path | None = None,
    ) -> tuple[RunReport, BenchRow]:
        instance = InstanceFile.validate(Path(instance_path).read_text())
        if spec.cone_t is None and instance.cone_t is not None:
            spec = replace(spec, cone_t=instance.cone().t)
        witness = None
        if witness_path is not None:
            witness = WitnessFile.validate(Path(witness_path).read_text()).to_packing()
        return self.run(Path(instance_path).stem, instance.to_vectors(), spec, witness)

    def cmd_bench(
        self,
        instance_paths: Iterable[Path],
        specs: Sequence[StrategySpec],
        jobs: int = 1,
        omit_timing: bool = False,
    ) -> pd.DataFrame:
        """Every strategy on every instance, one row each, sorted by instance and strategy.

        All (instance, strategy) pairs are checked before any run starts; a cone
        strategy on an instance without a cone slope fails the whole table.

        A file ``<stem>.witness.json`` next to an instance is used when exact
        search gives up.
        """
        tasks = []
        for path in map(Path, instance_paths):
            witness_path = path.with_name(f"{path.stem}.witness.json")
            witness_raw = witness_path.read_text() if witness_path.exists() else None
            instance_raw = path.read_text()
            cone = InstanceFile.validate(instance_raw).cone()
            for spec in specs:
                if spec.cone_t is None and cone is not None:
                    spec = replace(spec, cone_t=cone.t)
                if spec.needs_cone and spec.cone_t is None:
                    raise ValueError(f"Strategy {spec.name} needs a cone slope, but instance {path} declares none")
                tasks.append((path.stem, instance_raw, spec, witness_raw, self.settings, omit_timing))

        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_bench_task, tasks))
        else:
            rows = [_bench_task(task) for task in tasks]

        frame = pd.DataFrame(rows, columns=list(BenchRow.model_fields))
        return frame.sort_values(["instance_id", "strategy", "dispatched"], kind="stable").reset_index(drop=True)

    def cmd_curve(
        self,
        t_values: Iterable[Fraction] | None = None,
        epsilon: Fraction = Fraction(0),
        variants: Sequence[Variant] = (Variant.A, Variant.A_PRIME),
        steps: int = Defaults.curve_steps,
    ) -> pd.DataFrame:
        """Bound curves over a grid of cone slopes, largest slope first.

        The default grid is ``m/steps`` for ``m = 1..steps`` plus the slopes
        1/3 and 7/15 where the curves change shape. Values outside a
        variant's admissible range are left blank.
        """
        if t_values is None:
            grid = {Fraction(m, steps) for m in range(1, steps + 1)}
            grid |= {Fraction(1, 3), Fraction(7, 15)}
        else:
            grid = {Fraction(t) for t in t_values}

        rows = []
        for t in sorted(grid, reverse=True):
            row = {"t": _six(t), "gamma": f"{ConeParams(t).gamma:.6f}"}
            if Variant.A in variants:
                row["c_A"] = _six(bound_formula(Variant.A, t, epsilon)) if t > Fraction(1, 3) else ""
            if Variant.A_PRIME in variants:
                row["c_Aprime"] = _six(bound_formula(Variant.A_PRIME, t, epsilon)) if t >= Fraction(1, 3) else ""
            row["c_combined"] = _six(combined_bound(t, epsilon))
            row["firstfit"] = _six(FIRSTFIT_REFERENCE)
            row["anyfit_lower_bound"] = _six(ANYFIT_LOWER_BOUND)
            rows.append(row)
        return pd.DataFrame(rows)

    def cmd_verify_lemma(
        self,
        samples: dict[int, int] | None = None,
        seed: int = Defaults.seed,
    ) -> pd.DataFrame:
        """Try the two-and-a-half repacking on random feasible bins of long vectors.

        ``samples`` maps each k to the number of random bins tried.
        """
        samples = samples or {100: Defaults.lemma_samples, 200: 200}
        rows = []
        for k, count in sorted(samples.items()):
            failures = 0
            for index in range(count):
                contents = random_long_vector_bin(k, seed + index)
                if repack_two_and_half(contents, k) is None:
                    failures += 1
                    logger.warning("Repacking failed for k=%d seed=%d", k, seed + index)
            rows.append({"k": k, "samples": count, "successes": count - failures, "failures": failures})
        return pd.DataFrame(rows)
