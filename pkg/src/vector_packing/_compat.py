"""Version shims: stdlib on Python >= 3.11, equivalent backports on 3.10."""

import sys

if sys.version_info >= (3, 11):
    from enum import StrEnum
    from typing import Self
else:
    from enum import Enum

    from typing_extensions import Self

    class StrEnum(str, Enum):
        """Backport of enum.StrEnum: str() and format() yield the value."""

        __str__ = str.__str__
        __format__ = str.__format__

if sys.version_info >= (3, 12):

    def format_fixed(value, places: int) -> str:
        """Format ``value`` with ``.{places}f``."""
        return format(value, f".{places}f")

else:
    from fractions import Fraction

    def format_fixed(value, places: int) -> str:
        """Format ``value`` with ``.{places}f``.

        Fractions get the exact round-half-even rendering that
        ``Fraction.__format__`` provides from Python 3.12 on.
        """
        if not isinstance(value, Fraction):
            return format(value, f".{places}f")
        sign = "-" if value < 0 else ""
        scaled = round(abs(value) * 10**places)
        digits = str(scaled).rjust(places + 1, "0")
        if places == 0:
            return sign + digits
        return f"{sign}{digits[:-places]}.{digits[-places:]}"


__all__ = ["Self", "StrEnum", "format_fixed"]
