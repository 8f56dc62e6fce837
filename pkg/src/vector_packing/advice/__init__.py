from .payload import AdvicePayload, RestrictedAdvice, ScaledAdvice, write_tape
from .tape import (
    AdviceTape,
    BitString,
    MalformedTapeError,
    decode_counts,
    decode_self_delimiting,
    encode_counts,
    encode_self_delimiting,
    field_width,
)

# The oracles live in ``advice.oracle``; they classify vectors with the
# restricted and scaled modules, which in turn import the payload types.

__all__ = [
    "AdvicePayload",
    "RestrictedAdvice",
    "ScaledAdvice",
    "write_tape",
    "AdviceTape",
    "BitString",
    "MalformedTapeError",
    "decode_counts",
    "decode_self_delimiting",
    "encode_counts",
    "encode_self_delimiting",
    "field_width",
]
