"""Online execution: replay a sequence against a strategy, one vector at a time."""

import logging
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .advice.tape import BitString
from .core import Bin, BinLabel, Packing, TraceStep, Vec2, fits, validate_packing
from .schemas import SolverAudit, TraceRecord

__all__ = [
    "StrategyError",
    "AdviceMismatchError",
    "OnlineStrategy",
    "FirstFit",
    "BestFit",
    "NextFit",
    "RunReport",
    "run_online",
    "first_fit_step",
    "check_anyfit",
    "trace_to_jsonl",
    "trace_from_jsonl",
]

logger = logging.getLogger(__name__)


class StrategyError(RuntimeError):
    """Raised when a strategy breaks the online contract."""


class AdviceMismatchError(StrategyError):
    """Raised when an arriving vector has no reserved slot left for it."""


def first_fit_step(
    bins: Sequence[Bin],
    v: Vec2,
    accepts: Callable[[Bin, Vec2], bool] = fits,
) -> int | None:
    """Index of the first bin that accepts ``v``, or None if a new bin is needed.

    ``accepts`` defaults to the plain feasibility test; advice strategies pass
    their virtual-load test instead.
    """
    for index, b in enumerate(bins):
        if accepts(b, v):
            return index
    return None


class OnlineStrategy(ABC):
    """Base class for online strategies.

    Subclasses own their bins, place each vector irrevocably in ``step`` and
    return the index of the bin used.
    """

    name: str = "strategy"

    def __init__(self):
        self.bins: list[Bin] = []
        self.advice_bits_read = 0
        self.advice: BitString | None = None

    def open_bin(self, label: BinLabel | None = None) -> int:
        self.bins.append(Bin(label=label or BinLabel()))
        return len(self.bins) - 1

    def place(self, index: int, v: Vec2) -> int:
        self.bins[index].add(v)
        return index

    @abstractmethod
    def step(self, v: Vec2) -> int: ...

    def audit(self) -> SolverAudit | None:
        """Offline solver decisions behind the strategy, if it made any."""
        return None

    def finish(self, trace: list[TraceStep]) -> Packing:
        return Packing(bins=self.bins, trace=trace)


class FirstFit(OnlineStrategy):
    name = "FirstFit"

    def step(self, v: Vec2) -> int:
        index = first_fit_step(self.bins, v)
        if index is None:
            index = self.open_bin()
        return self.place(index, v)


class BestFit(OnlineStrategy):
    """Places each vector into the fitting bin with the largest L1 load."""

    name = "BestFit"

    def step(self, v: Vec2) -> int:
        best = None
        for index, b in enumerate(self.bins):
            if b.fits(v) and (best is None or b.load > self.bins[best].load):
                best = index
        if best is None:
            best = self.open_bin()
        return self.place(best, v)


class NextFit(OnlineStrategy):
    """Only the most recently opened bin is considered. Not an AnyFit strategy."""

    name = "NextFit"

    def step(self, v: Vec2) -> int:
        if not self.bins or not self.bins[-1].fits(v):
            self.open_bin()
        return self.place(len(self.bins) - 1, v)


@dataclass
class RunReport:
    strategy: str
    packing: Packing
    advice_bits_read: int = 0
    kind_counts: dict[str, int] = field(default_factory=dict)
    advice: BitString | None = None
    audit: SolverAudit | None = None

    @property
    def bins_used(self) -> int:
        return len(self.packing.bins)

    @property
    def trace(self) -> list[TraceStep]:
        return self.packing.trace


def run_online(strategy: OnlineStrategy, sigma: Iterable[Vec2]) -> RunReport:
    """Serve ``sigma`` in order and return the resulting packing with its trace."""
    sigma = list(sigma)
    trace: list[TraceStep] = []
    for step, v in enumerate(sigma):
        open_before = len(strategy.bins)
        index = strategy.step(v)
        if not 0 <= index < len(strategy.bins):
            raise StrategyError(f"{strategy.name} returned unknown bin {index} at step {step}")
        if not strategy.bins[index].is_feasible():
            raise StrategyError(
                f"{strategy.name} overfilled bin {index} with {v} at step {step}"
            )
        trace.append(TraceStep(step, v, index, opened=index >= open_before))

    packing = strategy.finish(trace)
    validation = validate_packing(packing, sigma)
    if not validation:
        raise StrategyError(f"{strategy.name} produced an invalid packing: {validation.violations}")

    kinds = Counter(b.label.kind.value for b in packing.bins)
    logger.debug("%s used %d bins on %d vectors", strategy.name, len(packing.bins), len(sigma))
    return RunReport(
        strategy=strategy.name,
        packing=packing,
        advice_bits_read=strategy.advice_bits_read,
        kind_counts=dict(sorted(kinds.items())),
        advice=strategy.advice,
        audit=strategy.audit(),
    )


def check_anyfit(trace: Iterable[TraceStep]) -> bool:
    """True iff no step opened a bin while the vector fit an open bin.

    Fit is judged on actual coordinate sums, replayed from the trace.
    """
    bins: list[Bin] = []
    for record in trace:
        # Bins pre-opened by a strategy appear without an opening step.
        while len(bins) <= record.bin_index:
            bins.append(Bin())
        if record.opened and any(b.fits(record.vector) for b in bins[: record.bin_index]):
            return False
        bins[record.bin_index].add(record.vector)
    return True


def trace_to_jsonl(trace: Iterable[TraceStep]) -> str:
    lines = [TraceRecord.from_step(record).model_dump_json() for record in trace]
    return "".join(line + "\n" for line in lines)


def trace_from_jsonl(text: str) -> list[TraceStep]:
    return [
        TraceRecord.model_validate_json(line).to_step()
        for line in text.splitlines()
        if line.strip()
    ]
