"""Engineering-suffix parsing for command-line and config input.

The library itself is strict SI; only user-facing entry points accept
strings such as ``"250n"``, ``"5k"`` or ``"1.03u"``.
"""

from __future__ import annotations

import math
import re

from .errors import ValidationError

SUFFIXES = {
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "µ": 1e-6,  # micro sign
    "μ": 1e-6,  # greek mu
    "m": 1e-3,
    "k": 1e3,
    "K": 1e3,
    "M": 1e6,
    "G": 1e9,
}

_PATTERN = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([pnuµμmkKMG]?)\s*$")


def parse_quantity(value) -> float:
    """``"5k"`` -> 5000.0. Numbers pass through unchanged."""
    if isinstance(value, bool):
        raise ValidationError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        match = _PATTERN.match(value)
        if not match:
            raise ValidationError(f"cannot parse quantity {value!r}")
        number, suffix = match.groups()
        out = float(number) * SUFFIXES.get(suffix, 1.0)
    else:
        raise ValidationError(f"expected a number or string, got {type(value).__name__}")
    if not math.isfinite(out):
        raise ValidationError(f"quantity must be finite, got {value!r}")
    return out
