import math

import pytest

from nlcavity.errors import UnitError
from nlcavity.units import parse_quantity


@pytest.mark.parametrize(
    "text, kind, value",
    [
        ("3 mW", "power", 3e-3),
        ("1425 nm", "length", 1425e-9),
        ("2.85 um", "length", 2.85e-6),
        ("12 ns", "time", 12e-9),
        ("550 pm/V", "chi2", 550e-12),
        ("2.0e8 rad/s", "rate", 2e8),
        ("96 MHz", "rate", 2 * math.pi * 96e6),
    ],
)
def test_parse_quantity(text, kind, value):
    assert parse_quantity(text, kind) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("bad", [3, 3.0, "3", "3 furlongs", "mW 3", "", None, "3 nm"])
def test_parse_quantity_rejects(bad):
    with pytest.raises(UnitError):
        parse_quantity(bad, "power")


def test_error_names_the_key():
    with pytest.raises(UnitError, match="pump.power"):
        parse_quantity("3", "power", "pump.power")
