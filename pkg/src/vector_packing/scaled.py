"""The grid strategy for unrestricted vectors.

The unit square is cut into a ``k x k`` grid of boxes. A vector is *short*
when both coordinates are at most ``40/k`` and *long* otherwise. Long vectors
are rounded up to the upper corner of their box (k-scaling); the advice is the
number of long vectors per box, from which an optimal packing of the scaled
vectors is computed and opened as critical bins before the first arrival.
"""

import logging
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from ._compat import StrEnum
from fractions import Fraction
from typing import Iterable, Literal, Mapping, Sequence

from .advice import AdviceTape, ScaledAdvice
from .config import Defaults
from .core import Bin, BinKind, BinLabel, ReservedSlot, Vec2
from .engine import AdviceMismatchError, OnlineStrategy, first_fit_step
from .schemas import BinTypeRecord, SolverAudit

__all__ = [
    "ScaledMode",
    "ScaledParams",
    "BinType",
    "ScaledSolution",
    "AkStrategy",
    "Repacking",
    "box_of",
    "k_scale",
    "is_short",
    "solve_scaled_opt",
    "overflow_bin_bound",
    "repack_two_and_half",
]

logger = logging.getLogger(__name__)

Box = tuple[int, int]
SolverMethod = Literal["auto", "dp", "branch_and_bound"]


class ScaledMode(StrEnum):
    DESK = "desk"
    THEORY = "theory"
    DIAGNOSTIC = "diagnostic"


@dataclass(frozen=True)
class ScaledParams:
    """Grid resolution ``k`` checked against a mode.

    desk: any even k >= 100. theory: even k >= 640. diagnostic: any k >= 1,
    odd values included, for reproducing the odd-grid lower bound.
    """

    k: int = Defaults.desk_k
    mode: ScaledMode = ScaledMode.DESK

    def __post_init__(self):
        mode = ScaledMode(self.mode)
        object.__setattr__(self, "mode", mode)
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if mode is ScaledMode.DIAGNOSTIC:
            return
        if self.k % 2:
            raise ValueError(f"k must be even outside diagnostic mode, got {self.k}")
        minimum = Defaults.theory_k if mode is ScaledMode.THEORY else Defaults.desk_k
        if self.k < minimum:
            raise ValueError(f"{mode.value} mode needs k >= {minimum}, got {self.k}")
        if mode is ScaledMode.THEORY:
            logger.warning(
                "Theory mode k=%d: the advice has %d fields and the solver may run for a long time",
                self.k,
                self.k * self.k,
            )

    @property
    def short_threshold(self) -> Fraction:
        return Fraction(40, self.k)

    @property
    def max_long_per_bin(self) -> int:
        return 2 * (self.k // 40)


def box_of(v: Vec2, k: int) -> Box:
    """Grid cell ``((i-1)/k, i/k] x ((j-1)/k, j/k]``; zero coordinates land in cell 1."""
    return max(1, math.ceil(v.x * k)), max(1, math.ceil(v.y * k))


def k_scale(v: Vec2, k: int) -> Vec2:
    i, j = box_of(v, k)
    return Vec2(Fraction(i, k), Fraction(j, k))


def is_short(v: Vec2, k: int) -> bool:
    threshold = Fraction(40, k)
    return v.x <= threshold and v.y <= threshold


@dataclass(frozen=True, order=True)
class BinType:
    """A multiset of boxes, stored as sorted ``((i, j), multiplicity)`` pairs."""

    boxes: tuple[tuple[Box, int], ...]

    @classmethod
    def from_counts(cls, counts: Mapping[Box, int]) -> "BinType":
        return cls(tuple(sorted((box, mult) for box, mult in counts.items() if mult)))

    @property
    def cardinality(self) -> int:
        return sum(mult for _, mult in self.boxes)

    @property
    def sum_i(self) -> int:
        return sum(i * mult for (i, _), mult in self.boxes)

    @property
    def sum_j(self) -> int:
        return sum(j * mult for (_, j), mult in self.boxes)

    def is_feasible(self, k: int) -> bool:
        return self.sum_i <= k and self.sum_j <= k

    def slots(self) -> list[Box]:
        return [box for box, mult in self.boxes for _ in range(mult)]


@dataclass(frozen=True)
class ScaledSolution:
    k: int
    bin_types: tuple[BinType, ...]
    method: Literal["dp", "branch_and_bound"]

    @property
    def bins(self) -> int:
        return len(self.bin_types)

    def grouped(self) -> list[tuple[BinType, int]]:
        """Distinct bin types with multiplicities, in order of first emission."""
        return list(Counter(self.bin_types).items())

    def to_audit(self) -> SolverAudit:
        return SolverAudit(
            k=self.k,
            bins=self.bins,
            method=self.method,
            bin_types=[
                BinTypeRecord(boxes=[(i, j, mult) for (i, j), mult in bin_type.boxes], count=count)
                for bin_type, count in self.grouped()
            ],
        )


State = tuple[int, ...]


class _TypeEnumerator:
    """Bin types over a fixed list of occupied boxes, as multiplicity tuples.

    Only types that hold the first remaining box and that cannot take any
    further remaining vector are produced. Some optimal packing uses such a
    bin for the first remaining box, so restricting to them keeps the optimum.
    """

    def __init__(self, boxes: Sequence[Box], k: int):
        self.boxes = boxes
        self.k = k

    def __call__(self, state: State) -> list[State]:
        first = next(index for index, count in enumerate(state) if count)
        n = len(self.boxes)
        mult = [0] * n
        found: list[State] = []

        def extend(pos: int, si: int, sj: int) -> None:
            if pos == n:
                if self._is_maximal(state, mult, si, sj):
                    found.append(tuple(mult))
                return
            if pos < first:
                extend(pos + 1, si, sj)
                return
            i, j = self.boxes[pos]
            most = min(state[pos], (self.k - si) // i, (self.k - sj) // j)
            least = 1 if pos == first else 0
            for m in range(most, least - 1, -1):
                mult[pos] = m
                extend(pos + 1, si + m * i, sj + m * j)
            mult[pos] = 0

        extend(0, 0, 0)
        # Lexicographically smallest bin type first.
        found.sort(key=self.to_type)
        return found

    def _is_maximal(self, state: State, mult: list[int], si: int, sj: int) -> bool:
        for pos, (i, j) in enumerate(self.boxes):
            if state[pos] > mult[pos] and si + i <= self.k and sj + j <= self.k:
                return False
        return True

    def to_type(self, mult: Sequence[int]) -> BinType:
        return BinType(tuple((box, m) for box, m in zip(self.boxes, mult) if m))


def _subtract(state: State, mult: State) -> State:
    return tuple(a - b for a, b in zip(state, mult))


def _lower_bound(state: State, boxes: Sequence[Box], k: int) -> int:
    total_i = sum(count * i for count, (i, _) in zip(state, boxes))
    total_j = sum(count * j for count, (_, j) in zip(state, boxes))
    return max(-(-total_i // k), -(-total_j // k))


def _solve_dp(root: State, enumerate_types: _TypeEnumerator) -> list[State]:
    """Memoized recurrence P(n) = 1 + min over bin types t of P(n - t).

    Runs on an explicit stack so deep instances do not hit the recursion limit.
    """
    memo: dict[State, tuple[int, State | None]] = {}
    pending_types: dict[State, list[State]] = {}
    stack = [root]
    while stack:
        state = stack[-1]
        if state in memo:
            stack.pop()
            continue
        if not any(state):
            memo[state] = (0, None)
            stack.pop()
            continue
        if state not in pending_types:
            pending_types[state] = enumerate_types(state)
        types = pending_types[state]
        unsolved = [_subtract(state, t) for t in types if _subtract(state, t) not in memo]
        if unsolved:
            stack.extend(unsolved)
            continue

        best_value, best_type = None, None
        for t in types:
            value = memo[_subtract(state, t)][0] + 1
            if best_value is None or value < best_value:
                best_value, best_type = value, t
        memo[state] = (best_value, best_type)
        del pending_types[state]
        stack.pop()

    logger.debug("Scaled DP solved %d states", len(memo))
    path, state = [], root
    while any(state):
        chosen = memo[state][1]
        path.append(chosen)
        state = _subtract(state, chosen)
    return path


def _greedy_path(root: State, boxes: Sequence[Box], k: int) -> list[State]:
    """First fit decreasing on the scaled vectors; the initial upper bound."""
    order = sorted(range(len(boxes)), key=lambda pos: (-(boxes[pos][0] + boxes[pos][1]), pos))
    bins: list[tuple[list[int], list[int]]] = []
    for pos in order:
        i, j = boxes[pos]
        for _ in range(root[pos]):
            for sums, mult in bins:
                if sums[0] + i <= k and sums[1] + j <= k:
                    sums[0] += i
                    sums[1] += j
                    mult[pos] += 1
                    break
            else:
                mult = [0] * len(boxes)
                mult[pos] = 1
                bins.append(([i, j], mult))
    return [tuple(mult) for _, mult in bins]


def _solve_branch_and_bound(
    root: State,
    boxes: Sequence[Box],
    k: int,
    enumerate_types: _TypeEnumerator,
) -> list[State]:
    best = _greedy_path(root, boxes, k)
    if len(best) <= _lower_bound(root, boxes, k):
        return best

    # Fewest bins with which a state has been reached so far.
    reached: dict[State, int] = {}
    path: list[State] = []
    nodes = 0

    def search(state: State) -> None:
        nonlocal best, nodes
        nodes += 1
        if not any(state):
            if len(path) < len(best):
                best = list(path)
            return
        if len(path) + _lower_bound(state, boxes, k) >= len(best):
            return
        if reached.get(state, len(path) + 1) <= len(path):
            return
        reached[state] = len(path)
        for t in enumerate_types(state):
            path.append(t)
            search(_subtract(state, t))
            path.pop()

    search(root)
    logger.debug("Scaled branch-and-bound explored %d nodes", nodes)
    return best


def solve_scaled_opt(
    counts: Mapping[Box, int],
    k: int,
    method: SolverMethod = "auto",
    state_limit: int = Defaults.dp_state_limit,
) -> ScaledSolution:
    """Minimum number of bins for the k-scaled vectors counted per box.

    ``auto`` runs the memoized recurrence while the number of count vectors
    below ``counts`` stays within ``state_limit`` and branch-and-bound beyond.
    Both methods return the same bin count; bin types are emitted in search
    order with ties broken towards the lexicographically smallest type.
    """
    for (i, j), count in counts.items():
        if not (1 <= i <= k and 1 <= j <= k):
            raise ValueError(f"Box ({i}, {j}) outside the {k}x{k} grid")
        if count < 0:
            raise ValueError(f"Box ({i}, {j}) has negative count {count}")

    boxes = sorted(box for box, count in counts.items() if count)
    root = tuple(counts[box] for box in boxes)
    enumerate_types = _TypeEnumerator(boxes, k)

    if method == "auto":
        states = math.prod(count + 1 for count in root)
        method = "dp" if states <= state_limit else "branch_and_bound"
        logger.debug("Scaled solver: %d occupied boxes, %d states, using %s", len(boxes), states, method)

    if not root:
        path = []
    elif method == "dp":
        path = _solve_dp(root, enumerate_types)
    elif method == "branch_and_bound":
        path = _solve_branch_and_bound(root, boxes, k, enumerate_types)
    else:
        raise ValueError(f"Unknown solver method {method!r}")

    return ScaledSolution(
        k=k,
        bin_types=tuple(enumerate_types.to_type(mult) for mult in path),
        method=method,
    )


def overflow_bin_bound(opt: int, k: int) -> int:
    """Bin count bound when some bin holds only short vectors.

    Every critical bin then carries actual load above 9/10 - 80/k and a bin
    holds load at most 2.
    """
    floor = Fraction(9, 10) - Fraction(80, k)
    if floor <= 0:
        raise ValueError(f"The load floor 9/10 - 80/k is not positive for k={k}")
    return math.ceil(2 * opt / floor)


class AkStrategy(OnlineStrategy):
    """Serves long vectors into reserved box slots and short vectors by first fit."""

    name = "A_k"

    def __init__(
        self,
        params: ScaledParams,
        tape: AdviceTape,
        state_limit: int = Defaults.dp_state_limit,
    ):
        super().__init__()
        if params.k % 2:
            raise ValueError(f"The strategy needs an even k, got {params.k}")
        self.params = params
        self.k = params.k
        payload = ScaledAdvice.read(tape, self.k)
        self.advice_bits_read = tape.bits_read
        self.advice = tape.bits
        self.solution = solve_scaled_opt(payload.counts, self.k, state_limit=state_limit)
        self._queues: dict[Box, deque[int]] = {}
        self._open_critical_bins()

    def _open_critical_bins(self) -> None:
        for ordinal, bin_type in enumerate(self.solution.bin_types, 1):
            index = self.open_bin(BinLabel(BinKind.SCALED, ordinal))
            for i, j in bin_type.slots():
                self.bins[index].slots.append(
                    ReservedSlot(
                        kind=BinKind.SCALED,
                        key=(i, j),
                        reserved_l1=Fraction(i + j, self.k),
                        corner=Vec2(Fraction(i, self.k), Fraction(j, self.k)),
                    )
                )
                self._queues.setdefault((i, j), deque()).append(index)
        logger.debug("Opened %d critical bins for k=%d", len(self.bins), self.k)

    def audit(self) -> SolverAudit:
        return self.solution.to_audit()

    @staticmethod
    def accepts_short(b: Bin, v: Vec2) -> bool:
        x, y = b.reserved_sum()
        return x + v.x <= 1 and y + v.y <= 1

    def step(self, v: Vec2) -> int:
        if is_short(v, self.k):
            index = first_fit_step(self.bins, v, self.accepts_short)
            if index is None:
                index = self.open_bin(BinLabel(BinKind.OVERFLOW))
            return self.place(index, v)

        box = box_of(v, self.k)
        queue = self._queues.get(box)
        if not queue:
            raise AdviceMismatchError(f"No reserved slot left for box {box} ({v})")
        index = queue.popleft()
        slot = self.bins[index].unused_slot(BinKind.SCALED, box)
        if slot is None:
            raise AdviceMismatchError(f"Bin {index} lost its slot for box {box}")
        slot.used = True
        return self.place(index, v)


@dataclass
class Repacking:
    """Scaled contents of one bin split into two unit bins and a half bin."""

    bin_a: list[Vec2] = field(default_factory=list)
    bin_b: list[Vec2] = field(default_factory=list)
    half: list[Vec2] = field(default_factory=list)

    def parts(self) -> tuple[list[Vec2], list[Vec2], list[Vec2]]:
        return self.bin_a, self.bin_b, self.half


def repack_two_and_half(contents: Iterable[Vec2], k: int) -> Repacking | None:
    """Fit the k-scaled contents of a feasible bin into two bins and a half bin.

    Exhaustive search over the three targets; returns None when no
    assignment exists. Capacities are integers on the scaled grid: ``(k, k)``
    for the two bins and ``(k/2, k/2)`` for the half bin.
    """
    ScaledParams(k, ScaledMode.DESK)
    contents = list(contents)
    if any(is_short(v, k) for v in contents):
        raise ValueError("All vectors must be long")
    if sum(v.x for v in contents) > 1 or sum(v.y for v in contents) > 1:
        raise ValueError("Contents do not fit in one bin")

    items = sorted(contents, key=lambda v: sum(box_of(v, k)), reverse=True)
    scaled = [box_of(v, k) for v in items]
    capacity = [k, k, k // 2]
    sums = [[0, 0], [0, 0], [0, 0]]
    assignment = [0] * len(items)

    def assign(pos: int) -> bool:
        if pos == len(items):
            return True
        i, j = scaled[pos]
        for target in range(3):
            # The two unit bins are interchangeable until the first is used.
            if target == 1 and sums[0] == [0, 0]:
                continue
            if sums[target][0] + i > capacity[target] or sums[target][1] + j > capacity[target]:
                continue
            sums[target][0] += i
            sums[target][1] += j
            assignment[pos] = target
            if assign(pos + 1):
                return True
            sums[target][0] -= i
            sums[target][1] -= j
        return False

    if not assign(0):
        logger.warning("No two-and-a-half repacking for %d vectors at k=%d", len(items), k)
        return None

    result = Repacking()
    for v, target in zip(items, assignment):
        result.parts()[target].append(v)
    return result
