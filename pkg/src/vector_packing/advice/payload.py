from dataclasses import dataclass, field
from typing import Union

from .._compat import Self

from .tape import (
    AdviceTape,
    BitString,
    decode_counts,
    encode_counts,
    encode_self_delimiting,
)

__all__ = [
    "RestrictedAdvice",
    "ScaledAdvice",
    "AdvicePayload",
    "write_tape",
]


@dataclass(frozen=True)
class RestrictedAdvice:
    """Per-strip counts of large, medium and small vectors."""

    large: tuple[int, ...]
    medium: tuple[int, ...]
    small: tuple[int, ...]
    n: int

    def __post_init__(self):
        if not len(self.large) == len(self.medium) == len(self.small):
            raise ValueError("Large, medium and small counts need one entry per strip")
        if any(c < 0 for c in (*self.large, *self.medium, *self.small)):
            raise ValueError("Counts must be non-negative")
        if self.total > self.n:
            raise ValueError(f"Counts sum to {self.total} but the sequence has {self.n} vectors")

    @property
    def k(self) -> int:
        return len(self.large)

    @property
    def total(self) -> int:
        return sum(self.large) + sum(self.medium) + sum(self.small)

    def to_bits(self) -> BitString:
        return encode_counts((*self.large, *self.medium, *self.small), self.n)

    @classmethod
    def read(cls, tape: AdviceTape, k: int) -> Self:
        """Read the whole payload from the tape; the field width follows from its length."""
        blob = tape.read_self_delimiting()
        counts = decode_counts(blob, 3 * k)
        return cls(
            large=tuple(counts[:k]),
            medium=tuple(counts[k : 2 * k]),
            small=tuple(counts[2 * k :]),
            n=_length_bound(blob, 3 * k),
        )


@dataclass(frozen=True)
class ScaledAdvice:
    """Number of long vectors in each (i, j)-box, stored sparsely."""

    k: int
    counts: dict[tuple[int, int], int] = field(default_factory=dict)
    n: int = 0

    def __post_init__(self):
        for (i, j), count in self.counts.items():
            if not (1 <= i <= self.k and 1 <= j <= self.k):
                raise ValueError(f"Box ({i}, {j}) outside the {self.k}x{self.k} grid")
            if count < 0:
                raise ValueError(f"Box ({i}, {j}) has negative count {count}")
        if self.total > self.n:
            raise ValueError(f"Counts sum to {self.total} but the sequence has {self.n} vectors")

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def dense(self) -> list[int]:
        """Counts in row-major box order (1,1), (1,2), ..., (k,k)."""
        return [
            self.counts.get((i, j), 0)
            for i in range(1, self.k + 1)
            for j in range(1, self.k + 1)
        ]

    def to_bits(self) -> BitString:
        return encode_counts(self.dense(), self.n)

    @classmethod
    def read(cls, tape: AdviceTape, k: int) -> Self:
        blob = tape.read_self_delimiting()
        dense = decode_counts(blob, k * k)
        counts = {
            (index // k + 1, index % k + 1): count
            for index, count in enumerate(dense)
            if count
        }
        return cls(k=k, counts=counts, n=_length_bound(blob, k * k))


AdvicePayload = Union[RestrictedAdvice, ScaledAdvice]


def _length_bound(blob: BitString, fields: int) -> int:
    """Largest sequence length consistent with the field width of the blob.

    The reader never learns n itself, only w = |blob| / fields.
    """
    return (1 << (len(blob) // fields)) - 1


def write_tape(payload: AdvicePayload) -> BitString:
    """The complete advice tape: the self-delimited counts blob."""
    return encode_self_delimiting(payload.to_bits())
