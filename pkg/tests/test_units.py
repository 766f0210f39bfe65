import pytest

from aamecSim.maths.constants import PhysicalConstants
from aamecSim.maths.units import UnitManager


def test_speed_of_light_constant():
    assert PhysicalConstants.c == 299_792_458.0
    assert PhysicalConstants.R_E == 6_371_000.0


def test_parse_service_table_units():
    """Decimal prefixes: 1 B = 8 bit, 1 kbps = 1e3 bit/s, 1 MB = 8e6 bit."""
    assert UnitManager.parse("100 kbps", "rate") == 100e3
    assert UnitManager.parse("1.5 Mbps", "rate") == 1.5e6
    assert UnitManager.parse("933 B", "size") == 933 * 8
    assert UnitManager.parse("0.2 MB", "size") == pytest.approx(1.6e6)
    assert UnitManager.parse("60 ms", "time") == pytest.approx(0.060)
    assert UnitManager.parse("781 km", "length") == 781e3
    assert UnitManager.parse("2.8 GHz", "frequency") == pytest.approx(2.8e9)


def test_parse_bare_numbers_are_si():
    assert UnitManager.parse(300, "time") == 300.0
    assert UnitManager.parse("300", "time") == 300.0
    assert UnitManager.parse("-71.58 deg", "angle") == -71.58
    assert UnitManager.parse("1e-06 s", "time") == 1e-6


def test_parse_rejects_wrong_units():
    with pytest.raises(ValueError):
        UnitManager.parse("5 km", "time")
    with pytest.raises(ValueError):
        UnitManager.parse("fast", "speed")
    with pytest.raises(ValueError):
        UnitManager.parse("5 m", "mass")
    with pytest.raises(TypeError):
        UnitManager.parse(True, "time")


def test_emit_parses_back_exactly():
    for value, dimension in [(0.1 + 0.2, "time"), (781e3, "length"), (7464.0, "size"), (12.483, "angle")]:
        assert UnitManager.parse(UnitManager.emit(value, dimension), dimension) == value
