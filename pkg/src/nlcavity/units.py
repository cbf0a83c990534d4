"""Unit-suffixed quantity parsing for configuration files.

Every dimensioned value must carry an explicit suffix, e.g. ``"96 MHz"``,
``"5.5e7 rad/s"``, ``"3 mW"``, ``"950 nm"``. Frequencies given in Hz are
converted to angular units (x 2 pi) so that internally everything is rad/s.
"""

from __future__ import annotations

import math
import re

from .errors import UnitError

_RATE = {
    "rad/s": 1.0,
    "krad/s": 1e3,
    "Mrad/s": 1e6,
    "Grad/s": 1e9,
    "Hz": 2 * math.pi,
    "kHz": 2 * math.pi * 1e3,
    "MHz": 2 * math.pi * 1e6,
    "GHz": 2 * math.pi * 1e9,
    "THz": 2 * math.pi * 1e12,
}
_POWER = {"W": 1.0, "mW": 1e-3, "uW": 1e-6, "nW": 1e-9}
_LENGTH = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9, "pm": 1e-12}
_TIME = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15}
_CHI = {"m/V": 1.0, "pm/V": 1e-12}

UNITS = {"rate": _RATE, "power": _POWER, "length": _LENGTH, "time": _TIME, "chi2": _CHI}

_PATTERN = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/]+)\s*$")


def parse_quantity(value, kind: str, key: str = "") -> float:
    """Parse ``"<number> <unit>"`` into SI (angular for rates).

    >>> parse_quantity("1 kHz", "rate") / (2 * math.pi)
    1000.0
    """
    table = UNITS[kind]
    where = f" for key '{key}'" if key else ""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        raise UnitError(
            f"missing unit suffix{where}: got bare number {value!r}; "
            f"expected one of {sorted(table)}"
        )
    if not isinstance(value, str):
        raise UnitError(f"expected a string like '1.0 {next(iter(table))}'{where}, got {value!r}")
    m = _PATTERN.match(value)
    if m is None:
        raise UnitError(f"malformed quantity {value!r}{where}")
    number, unit = m.groups()
    if unit not in table:
        raise UnitError(f"unknown {kind} unit {unit!r}{where}; expected one of {sorted(table)}")
    return float(number) * table[unit]


def format_rate(x: float) -> str:
    return f"{x!r} rad/s"
