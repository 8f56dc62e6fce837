import base64
from fractions import Fraction
from typing import Literal, Optional

from ._compat import Self, format_fixed

from pydantic import (
    BaseModel,
    Field,
    TypeAdapter,
    field_validator,
    model_validator,
)

from .core import ConeParams, Packing, TraceStep, Vec2, in_cone

__all__ = [
    "InstanceFile",
    "WitnessFile",
    "TraceRecord",
    "TapeContainer",
    "BinTypeRecord",
    "SolverAudit",
    "BenchRow",
    "vector_to_record",
    "record_to_vector",
]

VectorRecord = tuple[int, int, int, int]


def vector_to_record(v: Vec2) -> VectorRecord:
    return (v.x.numerator, v.x.denominator, v.y.numerator, v.y.denominator)


def record_to_vector(record: VectorRecord) -> Vec2:
    xn, xd, yn, yd = record
    return Vec2(Fraction(xn, xd), Fraction(yn, yd))


def _check_record(record: VectorRecord) -> VectorRecord:
    xn, xd, yn, yd = record
    if xd <= 0 or yd <= 0:
        raise ValueError(f"Denominators must be positive, got {list(record)}")
    for num, den in ((xn, xd), (yn, yd)):
        if not 0 <= num <= den:
            raise ValueError(f"Coordinate {num}/{den} lies outside [0, 1]")
    return record


class InstanceFile(BaseModel):
    """Instance JSON: every rational is serialized as numerator, denominator."""

    vectors: list[VectorRecord]
    cone_t: Optional[tuple[int, int]] = None

    @field_validator("vectors", mode="after")
    @classmethod
    def ensure_unit_square(cls, value: list[VectorRecord]) -> list[VectorRecord]:
        return [_check_record(record) for record in value]

    @field_validator("cone_t", mode="after")
    @classmethod
    def ensure_cone_slope(cls, value: Optional[tuple[int, int]]) -> Optional[tuple[int, int]]:
        if value is None:
            return value
        num, den = value
        if den <= 0 or not 0 < num <= den:
            raise ValueError(f"cone_t must be a slope in (0, 1], got {list(value)}")
        return value

    @model_validator(mode="after")
    def ensure_in_cone(self) -> Self:
        cone = self.cone()
        if cone is None:
            return self
        for index, v in enumerate(self.to_vectors()):
            if not in_cone(v, cone):
                raise ValueError(f"Vector {index} {v} lies outside the cone t={cone.t}")
        return self

    def to_vectors(self) -> list[Vec2]:
        return [record_to_vector(record) for record in self.vectors]

    def cone(self) -> Optional[ConeParams]:
        if self.cone_t is None:
            return None
        return ConeParams(Fraction(*self.cone_t))

    @classmethod
    def from_vectors(
        cls,
        vectors: list[Vec2],
        cone_t: Optional[Fraction] = None,
    ) -> Self:
        return cls(
            vectors=[vector_to_record(v) for v in vectors],
            cone_t=None if cone_t is None else (cone_t.numerator, cone_t.denominator),
        )

    @classmethod
    def validate(cls, raw: str | bytes) -> Self:
        adapter = TypeAdapter(cls)
        return adapter.validate_json(raw)


class WitnessFile(BaseModel):
    """A packing certifying an upper bound on the optimum."""

    bins: list[list[VectorRecord]]

    @field_validator("bins", mode="after")
    @classmethod
    def ensure_unit_square(cls, value: list[list[VectorRecord]]) -> list[list[VectorRecord]]:
        return [[_check_record(record) for record in group] for group in value]

    def to_packing(self) -> Packing:
        return Packing.from_groups(
            [record_to_vector(record) for record in group] for group in self.bins
        )

    @classmethod
    def from_packing(cls, packing: Packing) -> Self:
        return cls(bins=[[vector_to_record(v) for v in b.contents] for b in packing.bins])

    @classmethod
    def validate(cls, raw: str | bytes) -> Self:
        adapter = TypeAdapter(cls)
        return adapter.validate_json(raw)


class TraceRecord(BaseModel):
    step: int = Field(ge=0)
    v: VectorRecord
    bin: int = Field(ge=0)
    opened: bool

    @field_validator("v", mode="after")
    @classmethod
    def ensure_unit_square(cls, value: VectorRecord) -> VectorRecord:
        return _check_record(value)

    @classmethod
    def from_step(cls, record: TraceStep) -> Self:
        return cls(
            step=record.step,
            v=vector_to_record(record.vector),
            bin=record.bin_index,
            opened=record.opened,
        )

    def to_step(self) -> TraceStep:
        return TraceStep(self.step, record_to_vector(self.v), self.bin, self.opened)


class TapeContainer(BaseModel):
    """Advice tape packed into bytes, most significant bit first."""

    bits: int = Field(ge=0)
    data: str

    @model_validator(mode="after")
    def ensure_consistent_length(self) -> Self:
        payload = base64.b64decode(self.data, validate=True)
        expected = (self.bits + 7) // 8
        if len(payload) != expected:
            raise ValueError(
                f"Tape declares {self.bits} bits but carries {len(payload)} bytes, "
                f"expected {expected}"
            )
        padding = expected * 8 - self.bits
        if padding and payload[-1] & ((1 << padding) - 1):
            raise ValueError("Tape padding bits must be zero")
        return self

    @classmethod
    def from_bits(cls, bits: str) -> Self:
        padded = bits + "0" * (-len(bits) % 8)
        payload = bytes(int(padded[i : i + 8], 2) for i in range(0, len(padded), 8))
        return cls(bits=len(bits), data=base64.b64encode(payload).decode("ascii"))

    def to_bits(self) -> str:
        payload = base64.b64decode(self.data)
        text = "".join(f"{byte:08b}" for byte in payload)
        return text[: self.bits]

    @classmethod
    def validate(cls, raw: str | bytes) -> Self:
        adapter = TypeAdapter(cls)
        return adapter.validate_json(raw)


class BinTypeRecord(BaseModel):
    boxes: list[tuple[int, int, int]] = Field(description="(i, j, multiplicity) per box")
    count: int = Field(ge=1, description="number of bins of this type")


class SolverAudit(BaseModel):
    k: int
    bins: int
    method: Literal["dp", "branch_and_bound"]
    bin_types: list[BinTypeRecord]

    @model_validator(mode="after")
    def ensure_bin_total(self) -> Self:
        total = sum(record.count for record in self.bin_types)
        if total != self.bins:
            raise ValueError(f"Bin types account for {total} bins, expected {self.bins}")
        return self

    @classmethod
    def validate(cls, raw: str | bytes) -> Self:
        adapter = TypeAdapter(cls)
        return adapter.validate_json(raw)


class BenchRow(BaseModel):
    instance_id: str
    strategy: str = Field(description="strategy as requested")
    dispatched: str = Field(description="strategy that actually ran")
    bins: int
    opt: int
    opt_kind: Literal["exact", "witness", "load_bound"]
    ratio: str
    bound: Optional[str] = Field(default=None, description="guaranteed competitive ratio, if any")
    within_bound: Optional[bool] = Field(default=None, description="checked against exact optima only")
    advice_bits: int
    wall_time_s: Optional[float] = None

    @field_validator("ratio", "bound", mode="before")
    @classmethod
    def render_ratio(cls, value):
        """Render exact ratios to six decimals; strings and None pass through."""
        if isinstance(value, (Fraction, int)):
            return format_fixed(Fraction(value), 6)
        return value
