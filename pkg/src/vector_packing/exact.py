"""Exact offline optimum by branch-and-bound, for desk-scale instances."""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from .config import Settings
from .core import Bin, Packing, Vec2, validate_packing

__all__ = [
    "ExactResult",
    "BudgetExhaustedError",
    "exact_opt",
    "first_fit_decreasing",
    "verify_witness",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExactResult:
    opt: int
    witness: Packing
    exact: bool = True
    lower: int = 0
    nodes: int = 0


class BudgetExhaustedError(RuntimeError):
    """Raised when the search hits its node budget; ``result`` holds the bounds reached."""

    def __init__(self, result: ExactResult):
        super().__init__(
            f"Node budget exhausted after {result.nodes} nodes: "
            f"optimum lies in [{result.lower}, {result.opt}]"
        )
        self.result = result


class _BudgetHit(Exception):
    pass


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def first_fit_decreasing(sigma: Sequence[Vec2]) -> Packing:
    """FirstFit after sorting by decreasing L1 norm."""
    order = sorted(sigma, key=lambda v: v.l1, reverse=True)
    packing = Packing()
    for v in order:
        for b in packing.bins:
            if b.fits(v):
                b.add(v)
                break
        else:
            b = Bin()
            b.add(v)
            packing.bins.append(b)
    return packing


def exact_opt(sigma: Sequence[Vec2], node_budget: int | None = None) -> ExactResult:
    """Minimum number of bins with a witness packing.

    Vectors are branched in decreasing L1 order. A vector is tried in every
    open bin with distinct coordinate sums and in at most one new bin.
    Raises BudgetExhaustedError once ``node_budget`` search nodes are spent.
    """
    sigma = list(sigma)
    if node_budget is None:
        node_budget = Settings.from_env().node_budget
    if not sigma:
        return ExactResult(opt=0, witness=Packing(), lower=0)

    # Scale everything to integers over the common denominator.
    scale = math.lcm(*(v.x.denominator for v in sigma), *(v.y.denominator for v in sigma))
    order = sorted(range(len(sigma)), key=lambda index: (-sigma[index].l1, index))
    xs = [int(sigma[index].x * scale) for index in order]
    ys = [int(sigma[index].y * scale) for index in order]

    total_x, total_y = sum(xs), sum(ys)
    lower = max(
        _ceil_div(total_x + total_y, 2 * scale),
        _ceil_div(total_x, scale),
        _ceil_div(total_y, scale),
        # No two vectors above 1/2 in the same coordinate share a bin.
        sum(2 * x > scale for x in xs),
        sum(2 * y > scale for y in ys),
        1,
    )

    initial = first_fit_decreasing(sigma)
    best_count = len(initial)
    best_assignment: list[int] | None = None
    if best_count == lower:
        logger.debug("First fit decreasing meets the lower bound %d", lower)
        return ExactResult(opt=best_count, witness=initial, lower=lower, nodes=0)

    # Suffix sums of the coordinates still to place.
    rest_x = [0] * (len(xs) + 1)
    rest_y = [0] * (len(ys) + 1)
    for pos in range(len(xs) - 1, -1, -1):
        rest_x[pos] = rest_x[pos + 1] + xs[pos]
        rest_y[pos] = rest_y[pos + 1] + ys[pos]

    sums_x: list[int] = []
    sums_y: list[int] = []
    assignment = [0] * len(xs)
    nodes = 0

    def search(pos: int) -> bool:
        """Returns True once a packing meeting the lower bound is found."""
        nonlocal nodes, best_count, best_assignment
        nodes += 1
        if nodes > node_budget:
            raise _BudgetHit
        if pos == len(xs):
            if len(sums_x) < best_count:
                best_count = len(sums_x)
                best_assignment = list(assignment)
                logger.debug("Improved to %d bins after %d nodes", best_count, nodes)
            return best_count == lower

        open_bins = len(sums_x)
        free_x = open_bins * scale - sum(sums_x)
        free_y = open_bins * scale - sum(sums_y)
        needed = max(
            0,
            _ceil_div(rest_x[pos] - free_x, scale),
            _ceil_div(rest_y[pos] - free_y, scale),
        )
        if open_bins + needed >= best_count:
            return False

        x, y = xs[pos], ys[pos]
        tried: set[tuple[int, int]] = set()
        for index in range(open_bins):
            key = (sums_x[index], sums_y[index])
            if key in tried or key[0] + x > scale or key[1] + y > scale:
                continue
            tried.add(key)
            sums_x[index] += x
            sums_y[index] += y
            assignment[pos] = index
            done = search(pos + 1)
            sums_x[index] -= x
            sums_y[index] -= y
            if done:
                return True

        if open_bins + 1 < best_count:
            sums_x.append(x)
            sums_y.append(y)
            assignment[pos] = open_bins
            done = search(pos + 1)
            sums_x.pop()
            sums_y.pop()
            if done:
                return True
        return False

    def witness() -> Packing:
        if best_assignment is None:
            return initial
        groups: list[list[Vec2]] = [[] for _ in range(best_count)]
        for pos, index in enumerate(best_assignment):
            groups[index].append(sigma[order[pos]])
        return Packing.from_groups(groups)

    try:
        search(0)
    except _BudgetHit:
        result = ExactResult(opt=best_count, witness=witness(), exact=False, lower=lower, nodes=nodes)
        logger.warning("Exact search gave up at [%d, %d] after %d nodes", lower, best_count, nodes)
        raise BudgetExhaustedError(result) from None

    logger.debug("Exact optimum %d after %d nodes", best_count, nodes)
    return ExactResult(opt=best_count, witness=witness(), lower=lower, nodes=nodes)


def verify_witness(opt_claim: int, witness: Packing, sigma: Sequence[Vec2]) -> bool:
    return len(witness.bins) == opt_claim and validate_packing(witness, sigma).ok

