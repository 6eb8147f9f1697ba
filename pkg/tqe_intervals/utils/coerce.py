"""Strict, locale-independent number parsing for user input."""

from __future__ import annotations

import math
import re
from typing import List, Optional

from ..errors import DomainError

# dot decimal separator only; "1,5" and "1 000" are rejected
_DECIMAL = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?$")
_INTEGER = re.compile(r"^[+-]?\d+$")


def to_float(v, field: str = "value") -> float:
    text = str(v).strip() if v is not None else ""
    if not _DECIMAL.match(text):
        raise DomainError(f"{field}: expected a dot-decimal number, got {v!r}")
    result = float(text)
    if not math.isfinite(result):
        raise DomainError(f"{field}: value must be finite, got {v!r}")
    return result


def to_int(v, field: str = "value") -> int:
    text = str(v).strip() if v is not None else ""
    if not _INTEGER.match(text):
        raise DomainError(f"{field}: expected an integer, got {v!r}")
    return int(text)


def to_optional_int(v, field: str = "value") -> Optional[int]:
    if to_str(v) == "":
        return None
    return to_int(v, field)


def to_float_list(text: str, field: str = "value") -> List[float]:
    """Parse ``"76.85,81.99"`` into floats; empty items are errors, not skipped."""

    parts = [part.strip() for part in str(text).split(",")]
    return [to_float(part, field) for part in parts]


def to_str(v) -> str:
    """Missing cells (None or a NaN pad from a short CSV row) read as empty."""

    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return str(v).strip()


__all__ = ["to_float", "to_int", "to_optional_int", "to_float_list", "to_str"]
