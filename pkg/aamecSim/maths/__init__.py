# Maths Module Init

from .constants import PhysicalConstants
from .units import UnitManager
from .geom import (
    EcefPosition,
    GeodeticPoint,
    OrbitShell,
    FlightRoute,
    EarthGeometry,
    Kinematics,
)

__all__ = [
    "PhysicalConstants",
    "UnitManager",
    "EcefPosition",
    "GeodeticPoint",
    "OrbitShell",
    "FlightRoute",
    "EarthGeometry",
    "Kinematics",
]
