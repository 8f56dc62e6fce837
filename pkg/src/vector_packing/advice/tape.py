"""Bit strings, the self-delimiting encoding and the advice tape reader.

A bit string ``s`` is written to the tape as ``u(s) b(s) s`` where ``b(s)``
is the binary length of ``s`` and ``u(s)`` is ``|b(s)|`` ones followed by a
zero, so a reader learns how many bits to consume from the tape itself.
"""

import logging
from dataclasses import dataclass
from typing import Iterable

from .._compat import Self

from ..schemas import TapeContainer

__all__ = [
    "BitString",
    "MalformedTapeError",
    "AdviceTape",
    "field_width",
    "encode_self_delimiting",
    "decode_self_delimiting",
    "encode_counts",
    "decode_counts",
]

logger = logging.getLogger(__name__)


class MalformedTapeError(ValueError):
    """Raised when the tape ends inside a field or holds an invalid encoding."""


@dataclass(frozen=True)
class BitString:
    bits: str = ""

    def __post_init__(self):
        if any(bit not in "01" for bit in self.bits):
            raise ValueError(f"Bit strings may only hold 0 and 1, got {self.bits!r}")

    @property
    def length(self) -> int:
        return len(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __add__(self, other: "BitString") -> "BitString":
        return BitString(self.bits + other.bits)

    def __str__(self) -> str:
        return self.bits

    @classmethod
    def from_int(cls, value: int, width: int) -> Self:
        """Big-endian, zero-padded binary of ``value`` in exactly ``width`` bits."""
        if value < 0 or value.bit_length() > width:
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls(format(value, f"0{width}b") if width else "")

    @classmethod
    def concat(cls, parts: Iterable["BitString"]) -> Self:
        return cls("".join(part.bits for part in parts))

    def to_int(self) -> int:
        return int(self.bits, 2) if self.bits else 0

    def to_container(self) -> TapeContainer:
        return TapeContainer.from_bits(self.bits)

    @classmethod
    def from_container(cls, container: TapeContainer) -> Self:
        return cls(container.to_bits())


def _binary_length(n: int) -> BitString:
    # b("") is the single bit "0"
    return BitString(format(n, "b"))


def encode_self_delimiting(s: BitString) -> BitString:
    b = _binary_length(len(s))
    u = BitString("1" * len(b) + "0")
    return u + b + s


def decode_self_delimiting(tape: BitString, cursor: int = 0) -> tuple[BitString, int]:
    """Read one self-delimited string at ``cursor``; return it and the new cursor."""
    bits = tape.bits
    width = 0
    while True:
        if cursor + width >= len(bits):
            raise MalformedTapeError(f"Tape ended in the unary header at bit {cursor + width}")
        if bits[cursor + width] == "0":
            break
        width += 1
    if width == 0:
        raise MalformedTapeError(f"Empty length field at bit {cursor}")

    start = cursor + width + 1
    if start + width > len(bits):
        raise MalformedTapeError(f"Tape ended in the length field at bit {start}")
    length = int(bits[start : start + width], 2)

    start += width
    if start + length > len(bits):
        raise MalformedTapeError(
            f"Tape ended in a {length}-bit payload at bit {start} (tape has {len(bits)} bits)"
        )
    return BitString(bits[start : start + length]), start + length


def field_width(n: int) -> int:
    """Bits per count field: ceil(log2(n + 1)), at least one."""
    if n < 0:
        raise ValueError(f"Sequence length must be non-negative, got {n}")
    return max(1, n.bit_length())


def encode_counts(counts: Iterable[int], n: int) -> BitString:
    """Concatenate fixed-width big-endian fields, one per count."""
    width = field_width(n)
    parts = []
    for count in counts:
        if not 0 <= count <= n:
            raise ValueError(f"Count {count} outside [0, {n}]")
        parts.append(BitString.from_int(count, width))
    return BitString.concat(parts)


def decode_counts(blob: BitString, fields: int) -> list[int]:
    """Split a counts blob into ``fields`` equal-width integers."""
    if fields <= 0:
        raise ValueError(f"Field count must be positive, got {fields}")
    if len(blob) % fields:
        raise MalformedTapeError(f"{len(blob)} bits cannot hold {fields} equal fields")
    width = len(blob) // fields
    if width == 0:
        raise MalformedTapeError("Counts blob is empty")
    bits = blob.bits
    return [int(bits[i : i + width], 2) for i in range(0, len(bits), width)]


class AdviceTape:
    """Sequential reader over an advice bit string; counts the bits consumed."""

    def __init__(self, bits: BitString):
        self.bits = bits
        self.cursor = 0

    @property
    def bits_read(self) -> int:
        return self.cursor

    def read_self_delimiting(self) -> BitString:
        s, self.cursor = decode_self_delimiting(self.bits, self.cursor)
        logger.debug("Read %d advice bits (payload %d)", self.cursor, len(s))
        return s
