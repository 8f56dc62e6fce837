"""Exact-arithmetic domain model: vectors, norms, bins, packings and feasibility.

Every quantity is a ``fractions.Fraction``. Feasibility is the closed
constraint ``sum_x <= 1 and sum_y <= 1`` of a bin's coordinate sums.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from ._compat import StrEnum
from fractions import Fraction
from typing import Iterable, Literal, Union

__all__ = [
    "Rational",
    "Vec2",
    "ConeParams",
    "BinKind",
    "BinLabel",
    "ReservedSlot",
    "Bin",
    "TraceStep",
    "Packing",
    "Violation",
    "PackingValidation",
    "OutOfConeError",
    "as_rational",
    "parse_rational",
    "format_rational",
    "l1_norm",
    "linf_norm",
    "fits",
    "load",
    "opt_load_lower_bound",
    "in_cone",
    "validate_packing",
]

logger = logging.getLogger(__name__)

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class OutOfConeError(ValueError):
    """Raised when a vector lies outside the declared angle cone."""


def as_rational(value: Union[Fraction, int, str]) -> Fraction:
    """Coerce ints, fractions and exact strings to a Fraction.

    Floats are rejected: they would silently carry binary rounding into
    feasibility decisions.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``"N/D"``, ``"N"`` or a decimal literal such as ``"0.2679492"``."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as err:
        raise ValueError(f"Invalid rational: {text!r}") from err


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True, order=True)
class Vec2:
    """An input vector in the unit square."""

    x: Fraction
    y: Fraction

    def __post_init__(self):
        x = as_rational(self.x)
        y = as_rational(self.y)
        if not (ZERO <= x <= ONE and ZERO <= y <= ONE):
            raise ValueError(f"Vector ({x}, {y}) lies outside [0,1]^2")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def l1(self) -> Fraction:
        return self.x + self.y

    @property
    def linf(self) -> Fraction:
        return max(self.x, self.y)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def __str__(self) -> str:
        return f"({format_rational(self.x)}, {format_rational(self.y)})"


def l1_norm(v: Vec2) -> Fraction:
    return v.x + v.y


def linf_norm(v: Vec2) -> Fraction:
    return max(v.x, v.y)


@dataclass(frozen=True)
class ConeParams:
    """Angle restriction given by the slope ``t = tan(pi/4 - gamma/2)``.

    A vector lies in the cone iff ``t*x <= y`` and ``t*y <= x``.
    """

    t: Fraction

    def __post_init__(self):
        t = as_rational(self.t)
        if not (ZERO < t <= ONE):
            raise ValueError(f"Cone slope must lie in (0, 1], got {t}")
        object.__setattr__(self, "t", t)

    @property
    def d(self) -> Fraction:
        """Largest L1 norm of an in-cone vector inside the unit square."""
        return 1 + self.t

    @property
    def gamma(self) -> float:
        """Opening angle in radians, for display only."""
        return math.pi / 2 - 2 * math.atan(float(self.t))


def in_cone(v: Vec2, cone: ConeParams) -> bool:
    # The zero vector has no angle and is accepted everywhere.
    if v.is_zero():
        return True
    return cone.t * v.x <= v.y and cone.t * v.y <= v.x


class BinKind(StrEnum):
    PLAIN = "plain"
    HUGE = "huge"
    LARGE = "large"
    MEDIUM = "medium"
    SMALL = "small"
    SCALED = "scaled"
    OVERFLOW = "overflow"


SlotKey = Union[int, tuple[int, int], None]


@dataclass(frozen=True)
class BinLabel:
    """Diagnostic label of a bin. Never consulted for feasibility."""

    kind: BinKind = BinKind.PLAIN
    key: SlotKey = None

    def __str__(self) -> str:
        return self.kind.value if self.key is None else f"{self.kind.value}{self.key}"


@dataclass
class ReservedSlot:
    """Space reserved in a critical bin for one anticipated vector.

    ``key`` is the strip index (restricted strategies) or the ``(i, j)`` box
    (scaled strategy). ``corner`` is the reserved vector when its direction is
    known, i.e. the k-scaled box corner.
    """

    kind: BinKind
    key: SlotKey
    reserved_l1: Fraction
    corner: Vec2 | None = None
    used: bool = False

    def __post_init__(self):
        if self.reserved_l1 <= 0:
            raise ValueError(f"Reserved L1 must be positive, got {self.reserved_l1}")


@dataclass
class Bin:
    label: BinLabel = field(default_factory=BinLabel)
    contents: list[Vec2] = field(default_factory=list)
    sum_x: Fraction = ZERO
    sum_y: Fraction = ZERO
    slots: list[ReservedSlot] = field(default_factory=list)

    @property
    def sum(self) -> tuple[Fraction, Fraction]:
        return self.sum_x, self.sum_y

    @property
    def load(self) -> Fraction:
        return self.sum_x + self.sum_y

    @property
    def reserved_load(self) -> Fraction:
        return sum((s.reserved_l1 for s in self.slots if not s.used), ZERO)

    @property
    def virtual_load(self) -> Fraction:
        """Actual load plus the L1 value of every unused reservation."""
        return self.load + self.reserved_load

    def reserved_sum(self) -> tuple[Fraction, Fraction]:
        """Actual coordinate sums plus the corners of unused slots."""
        x, y = self.sum_x, self.sum_y
        for slot in self.slots:
            if not slot.used:
                if slot.corner is None:
                    raise ValueError(f"Slot {slot.key} of bin {self.label} has no corner")
                x += slot.corner.x
                y += slot.corner.y
        return x, y

    def is_feasible(self) -> bool:
        return self.sum_x <= 1 and self.sum_y <= 1

    def fits(self, v: Vec2) -> bool:
        return fits(self, v)

    def add(self, v: Vec2) -> None:
        self.contents.append(v)
        self.sum_x += v.x
        self.sum_y += v.y

    def unused_slot(self, kind: BinKind, key: SlotKey) -> ReservedSlot | None:
        """Lowest-index unused slot with the given kind and key."""
        for slot in self.slots:
            if not slot.used and slot.kind == kind and slot.key == key:
                return slot
        return None


def fits(b: Bin, v: Vec2) -> bool:
    return b.sum_x + v.x <= 1 and b.sum_y + v.y <= 1


def load(items: Iterable[Union[Vec2, Bin]]) -> Fraction:
    """Sum of L1 norms over vectors, or over the contents of bins."""
    total = ZERO
    for item in items:
        if isinstance(item, Bin):
            total += item.load
        else:
            total += item.x + item.y
    return total


def opt_load_lower_bound(sigma: Iterable[Vec2]) -> int:
    return math.ceil(load(sigma) / 2)


@dataclass(frozen=True)
class TraceStep:
    step: int
    vector: Vec2
    bin_index: int
    opened: bool


@dataclass
class Packing:
    bins: list[Bin] = field(default_factory=list)
    trace: list[TraceStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.bins)

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[Vec2]]) -> "Packing":
        """Build an offline packing from groups of vectors, one group per bin."""
        bins = []
        for group in groups:
            b = Bin()
            for v in group:
                b.add(v)
            bins.append(b)
        return cls(bins=bins)

    def groups(self) -> list[list[Vec2]]:
        return [list(b.contents) for b in self.bins]


@dataclass(frozen=True)
class Violation:
    kind: Literal["missing", "duplicate", "overfull"]
    detail: str


@dataclass(frozen=True)
class PackingValidation:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_packing(packing: Packing, sigma: Iterable[Vec2]) -> PackingValidation:
    """Check that ``packing`` partitions ``sigma`` and that every bin is feasible."""
    violations: list[Violation] = []

    expected = Counter(sigma)
    packed: Counter[Vec2] = Counter()
    for index, b in enumerate(packing.bins):
        sum_x = sum((v.x for v in b.contents), ZERO)
        sum_y = sum((v.y for v in b.contents), ZERO)
        if sum_x > 1 or sum_y > 1:
            violations.append(
                Violation("overfull", f"bin {index} has sums ({sum_x}, {sum_y})")
            )
        packed.update(b.contents)

    for v, count in expected.items():
        if packed[v] < count:
            violations.append(
                Violation("missing", f"{v} packed {packed[v]} of {count} times")
            )
    for v, count in packed.items():
        if count > expected[v]:
            violations.append(
                Violation("duplicate", f"{v} packed {count} times, expected {expected[v]}")
            )

    if violations:
        logger.debug("Packing rejected with %d violations", len(violations))
    return PackingValidation(tuple(violations))
