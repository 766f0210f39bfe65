import re
from typing import Dict, Union


Quantity = Union[int, float, str]

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/°]*)\s*$")


class UnitManager:
    """
    Handles conversion between configuration units and the SI units used
    internally (meters, seconds, bits, bits/second, hertz, degrees).
    All prefixes are decimal: 1 MB = 10^6 bytes, 1 byte = 8 bits.
    """

    SCALES: Dict[str, Dict[str, float]] = {
        "rate": {"bps": 1.0, "kbps": 1e3, "Mbps": 1e6, "Gbps": 1e9},
        "size": {"bit": 1.0, "b": 1.0, "kbit": 1e3, "Mbit": 1e6,
                 "B": 8.0, "kB": 8e3, "MB": 8e6, "GB": 8e9},
        "time": {"s": 1.0, "ms": 1e-3, "min": 60.0, "h": 3600.0},
        "length": {"m": 1.0, "km": 1e3},
        "speed": {"m/s": 1.0, "km/h": 1.0 / 3.6, "kn": 1852.0 / 3600.0},
        "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
        "angle": {"deg": 1.0, "°": 1.0},
    }

    # Unit written next to every emitted value
    SI_UNIT: Dict[str, str] = {
        "rate": "bps", "size": "bit", "time": "s", "length": "m",
        "speed": "m/s", "frequency": "Hz", "angle": "deg",
    }

    @staticmethod
    def parse(value: Quantity, dimension: str) -> float:
        """Converts `value` (bare SI number or '<number> <unit>') to SI."""
        if dimension not in UnitManager.SCALES:
            raise ValueError(f"Unknown dimension '{dimension}'.")
        if isinstance(value, bool):
            raise TypeError(f"Expected a {dimension} quantity, got a boolean.")
        if isinstance(value, (int, float)):
            return float(value)
        if not isinstance(value, str):
            raise TypeError(f"Expected a {dimension} quantity, got {type(value).__name__}.")

        match = _QUANTITY.match(value)
        if match is None:
            raise ValueError(f"Cannot read '{value}' as a {dimension} quantity.")
        number, unit = float(match.group(1)), match.group(2)
        if not unit:
            return number

        scales = UnitManager.SCALES[dimension]
        if unit not in scales:
            allowed = ", ".join(scales)
            raise ValueError(f"Unit '{unit}' is not a {dimension} unit (allowed: {allowed}).")
        return number * scales[unit]

    @staticmethod
    def emit(value: float, dimension: str) -> str:
        """SI value as a unit string that `parse` reads back exactly."""
        return f"{float(value)!r} {UnitManager.SI_UNIT[dimension]}"
