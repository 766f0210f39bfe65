import scipy.constants as const
from dataclasses import dataclass

@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable store of the physical constants used by the simulator (SI)."""
    c: float = const.c                  # Speed of Light [m/s]
    R_E: float = 6_371_000.0            # Spherical Earth Radius [m]
    mu: float = 3.986004418e14          # Earth Gravitational Parameter [m^3 s^-2]
    max_node_altitude: float = 2.1e6    # Highest modeled orbital shell [m]
    min_orbit_altitude: float = 1.6e5   # Lowest admissible circular orbit [m]
