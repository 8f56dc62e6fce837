"""Advice strategies for angle-restricted vectors.

Vectors are grouped by L1 norm into tiny, small, medium, large and huge.
The small, medium and large regions are each cut into ``k`` diagonal strips;
the advice is the number of vectors per strip. From it the strategy opens
critical bins up front, reserving the strip's upper L1 limit for every
anticipated vector, and serves arrivals into those reservations.

Two parameter sets are supported: variant ``A`` (a = 2/3, b = 4/3, needs
t > 1/3) and variant ``A'`` (a = 1/2, b = 3/2, needs t >= 1/3).
"""

import logging
import math
from collections import deque
from dataclasses import dataclass
from ._compat import StrEnum
from fractions import Fraction
from typing import Union

from .advice import AdviceTape, RestrictedAdvice
from .core import (
    BinKind,
    BinLabel,
    ConeParams,
    OutOfConeError,
    ReservedSlot,
    Vec2,
    as_rational,
    in_cone,
)
from .engine import AdviceMismatchError, OnlineStrategy, first_fit_step

__all__ = [
    "Variant",
    "GroupTag",
    "Group",
    "RestrictedParams",
    "BinPlan",
    "AGammaStrategy",
    "BREAK_EVEN_T",
    "make_params",
    "classify",
    "strip_upper",
    "plan_critical_bins",
    "bound_formula",
    "competitive_bound",
    "combined_bound",
    "combined_dispatch",
    "DispatchChoice",
]

logger = logging.getLogger(__name__)

# Slope at which 6/(1+3t) = 5/2: the angle pi/2 - 2*arctan(7/15).
BREAK_EVEN_T = Fraction(7, 15)


class Variant(StrEnum):
    A = "A"
    A_PRIME = "Aprime"


class GroupTag(StrEnum):
    TINY = "tiny"
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"
    HUGE = "huge"


_GROUP_CONSTANTS: dict[Variant, tuple[Fraction, Fraction]] = {
    Variant.A: (Fraction(2, 3), Fraction(4, 3)),
    Variant.A_PRIME: (Fraction(1, 2), Fraction(3, 2)),
}

_BIN_KIND = {
    GroupTag.SMALL: BinKind.SMALL,
    GroupTag.MEDIUM: BinKind.MEDIUM,
    GroupTag.LARGE: BinKind.LARGE,
}


@dataclass(frozen=True)
class RestrictedParams:
    cone: ConeParams
    variant: Variant
    k: int
    epsilon: Fraction

    def __post_init__(self):
        # make_params always derives k >= 8; smaller k is accepted for hand-sized examples.
        if self.k < 1:
            raise ValueError(f"Need at least one strip per region, got k={self.k}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        t = self.cone.t
        if self.variant is Variant.A and t <= Fraction(1, 3):
            raise ValueError(f"Variant A needs t > 1/3 (gamma < pi/3), got t={t}")
        if self.variant is Variant.A_PRIME and t < Fraction(1, 3):
            raise ValueError(f"Variant Aprime needs d/2 >= 2/3, i.e. t >= 1/3, got t={t}")

        a, b, d = self.a, self.b, self.d
        # No small or medium vector shares a bin with a huge one.
        assert a + b >= 2
        # No three small or medium vectors share a bin.
        assert (3 * a >= 2) if self.variant is Variant.A else (4 * a >= 2 and 3 * d / 2 >= 2)

    @property
    def a(self) -> Fraction:
        return _GROUP_CONSTANTS[self.variant][0]

    @property
    def b(self) -> Fraction:
        return _GROUP_CONSTANTS[self.variant][1]

    @property
    def d(self) -> Fraction:
        return self.cone.d

    def region(self, tag: GroupTag) -> tuple[Fraction, Fraction]:
        """Open-closed L1 interval (lo, hi] of a stripped group."""
        if tag is GroupTag.SMALL:
            return self.a, self.d / 2
        if tag is GroupTag.MEDIUM:
            return self.d / 2, Fraction(1)
        if tag is GroupTag.LARGE:
            return Fraction(1), self.b
        raise ValueError(f"Group {tag} has no strips")


def make_params(
    t: Union[Fraction, int, str],
    epsilon: Union[Fraction, int, str],
    variant: Variant = Variant.A,
) -> RestrictedParams:
    """Derive strategy parameters; ``k = max(8, ceil(8/epsilon))``."""
    epsilon = as_rational(epsilon)
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    k = max(8, math.ceil(8 / epsilon))
    return RestrictedParams(cone=ConeParams(as_rational(t)), variant=Variant(variant), k=k, epsilon=epsilon)


@dataclass(frozen=True)
class Group:
    tag: GroupTag
    strip: int | None = None


def strip_upper(tag: GroupTag, i: int, params: RestrictedParams) -> Fraction:
    """Upper L1 limit of strip ``i`` (1-based) of a group; the reserved value."""
    lo, hi = params.region(tag)
    return lo + i * (hi - lo) / params.k


def classify(v: Vec2, params: RestrictedParams) -> Group:
    if not in_cone(v, params.cone):
        raise OutOfConeError(f"{v} lies outside the cone t={params.cone.t}")

    norm = v.l1
    if norm <= params.a:
        return Group(GroupTag.TINY)
    if norm <= params.d / 2:
        tag = GroupTag.SMALL
    elif norm <= 1:
        tag = GroupTag.MEDIUM
    elif norm <= params.b:
        tag = GroupTag.LARGE
    else:
        return Group(GroupTag.HUGE)

    lo, hi = params.region(tag)
    strip = math.ceil((norm - lo) * params.k / (hi - lo))
    return Group(tag, min(params.k, max(1, strip)))


@dataclass(frozen=True)
class BinPlan:
    """Critical bins in creation order, described by the strips they reserve."""

    large: tuple[int, ...]
    medium: tuple[int, ...]
    small: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.large) + len(self.medium) + len(self.small)


def plan_critical_bins(payload: RestrictedAdvice, params: RestrictedParams) -> BinPlan:
    if payload.k != params.k:
        raise ValueError(f"Advice has {payload.k} strips, parameters expect {params.k}")

    large = tuple(i for i, count in enumerate(payload.large, 1) for _ in range(count))
    medium = tuple(i for i, count in enumerate(payload.medium, 1) for _ in range(count))

    # Pair the lowest non-empty small strip with the highest one until at
    # most a single small vector is left.
    remaining = list(payload.small)
    small: list[tuple[int, ...]] = []
    while sum(remaining) >= 2:
        i = next(s for s, count in enumerate(remaining) if count)
        j = max(s for s, count in enumerate(remaining) if count)
        remaining[i] -= 1
        remaining[j] -= 1
        small.append((i + 1, j + 1))
    for s, count in enumerate(remaining):
        if count:
            small.append((s + 1,))

    plan = BinPlan(large=large, medium=medium, small=tuple(small))
    logger.debug(
        "Critical bins: %d large, %d medium, %d small", len(large), len(medium), len(small)
    )
    return plan


class AGammaStrategy(OnlineStrategy):
    """The advice strategy for in-cone vectors, in either parameter variant."""

    def __init__(self, params: RestrictedParams, tape: AdviceTape):
        super().__init__()
        self.params = params
        self.name = "A_gamma" if params.variant is Variant.A else "A_prime_gamma"
        payload = RestrictedAdvice.read(tape, params.k)
        self.advice_bits_read = tape.bits_read
        self.advice = tape.bits
        self.plan = plan_critical_bins(payload, params)
        self._queues: dict[tuple[GroupTag, int], deque[int]] = {}
        self._open_critical_bins()

    def _reserve(self, index: int, tag: GroupTag, strip: int) -> None:
        kind = _BIN_KIND[tag]
        self.bins[index].slots.append(
            ReservedSlot(kind=kind, key=strip, reserved_l1=strip_upper(tag, strip, self.params))
        )
        self._queues.setdefault((tag, strip), deque()).append(index)

    def _open_critical_bins(self) -> None:
        for strip in self.plan.large:
            self._reserve(self.open_bin(BinLabel(BinKind.LARGE, strip)), GroupTag.LARGE, strip)
        for strip in self.plan.medium:
            self._reserve(self.open_bin(BinLabel(BinKind.MEDIUM, strip)), GroupTag.MEDIUM, strip)
        for strips in self.plan.small:
            index = self.open_bin(BinLabel(BinKind.SMALL, strips[0] if len(strips) == 1 else strips))
            for strip in strips:
                self._reserve(index, GroupTag.SMALL, strip)

    def accepts_tiny(self, b, v: Vec2) -> bool:
        """Tiny vectors go where the virtual load leaves room up to d."""
        return b.virtual_load + v.l1 <= self.params.d and b.fits(v)

    def step(self, v: Vec2) -> int:
        group = classify(v, self.params)

        if group.tag is GroupTag.HUGE:
            return self.place(self.open_bin(BinLabel(BinKind.HUGE)), v)

        if group.tag is GroupTag.TINY:
            index = first_fit_step(self.bins, v, self.accepts_tiny)
            if index is None:
                index = self.open_bin(BinLabel(BinKind.OVERFLOW))
            return self.place(index, v)

        queue = self._queues.get((group.tag, group.strip))
        if not queue:
            raise AdviceMismatchError(
                f"No reserved {group.tag.value} slot left for strip {group.strip} ({v})"
            )
        index = queue.popleft()
        slot = self.bins[index].unused_slot(_BIN_KIND[group.tag], group.strip)
        if slot is None:
            raise AdviceMismatchError(f"Bin {index} lost its {group.tag.value} slot {group.strip}")
        # Using the slot turns its reservation into actual load.
        slot.used = True
        return self.place(index, v)


def bound_formula(
    variant: Variant,
    t: Union[Fraction, int, str],
    epsilon: Union[Fraction, int, str] = 0,
) -> Fraction:
    """Competitive ratio bound of a variant at slope ``t``, evaluated exactly.

    Unlike ``make_params`` this accepts any t > 0, so high-precision
    surrogates of irrational slopes can be evaluated.
    """
    t, epsilon = as_rational(t), as_rational(epsilon)
    if t <= 0:
        raise ValueError(f"Slope must be positive, got {t}")
    if Variant(variant) is Variant.A:
        return max(Fraction(2), 6 / (1 + 3 * t) + epsilon)
    return max(Fraction(5, 2), 4 / (1 + 2 * t) + epsilon)


def competitive_bound(params: RestrictedParams) -> Fraction:
    return bound_formula(params.variant, params.cone.t, params.epsilon)


def combined_bound(
    t: Union[Fraction, int, str],
    epsilon: Union[Fraction, int, str] = 0,
) -> Fraction:
    """Bound of the combined strategy: variant A down to the break-even slope, 5/2 below."""
    t = as_rational(t)
    if t >= BREAK_EVEN_T:
        return bound_formula(Variant.A, t, epsilon)
    return Fraction(5, 2)


@dataclass(frozen=True)
class DispatchChoice:
    strategy: str
    restricted: RestrictedParams | None = None
    k: int | None = None


def combined_dispatch(
    t: Union[Fraction, int, str],
    epsilon: Union[Fraction, int, str],
    k: int = 100,
) -> DispatchChoice:
    """Choose the angle strategy for slopes at or above 7/15, the grid strategy below.

    ``k`` is the grid resolution used when the grid strategy is chosen.
    """
    t = as_rational(t)
    if t >= BREAK_EVEN_T:
        return DispatchChoice("A_gamma", restricted=make_params(t, epsilon, Variant.A))
    if k % 2:
        raise ValueError(f"The grid strategy needs an even k, got {k}")
    return DispatchChoice("A_k", k=k)
