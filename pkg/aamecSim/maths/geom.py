"""
Spherical-Earth geometry and kinematics.

Positions are expressed in an Earth-centered frame that does not rotate with
the Earth: gateways are fixed points, satellites move on circular Keplerian
orbits and aircraft on constant-speed great circles. All quantities are SI.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import PhysicalConstants


@dataclass(frozen=True)
class EcefPosition:
    """Cartesian position [m] in the Earth-centered frame."""
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError("Position components must be finite.")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    @classmethod
    def from_array(cls, v: np.ndarray) -> "EcefPosition":
        return cls(float(v[0]), float(v[1]), float(v[2]))


@dataclass(frozen=True)
class GeodeticPoint:
    """Latitude/longitude in degrees, altitude in meters above the sphere."""
    latitude: float
    longitude: float
    altitude: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"Latitude {self.latitude} outside [-90, 90].")
        if not -180.0 < self.longitude <= 180.0:
            raise ValueError(f"Longitude {self.longitude} outside (-180, 180].")
        if self.altitude < 0:
            raise ValueError("Altitude cannot be negative.")


@dataclass(frozen=True)
class OrbitShell:
    """
    Walker-style shell of circular orbits.
    Plane p has RAAN raan_origin + p * raan_spacing; slot s of plane p starts
    at argument of latitude s * 360/sats_per_plane + p * phase_offset.
    """
    plane_count: int
    sats_per_plane: int
    altitude: float
    inclination: float
    raan_spacing: float
    phase_offset: float = 0.0
    epoch: float = 0.0
    raan_origin: float = 0.0

    def __post_init__(self):
        for name in ("plane_count", "sats_per_plane"):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"{name} must be a positive integer.")
        if self.altitude <= PhysicalConstants.min_orbit_altitude:
            raise ValueError("Orbit altitude must exceed 160 km.")
        if self.altitude > PhysicalConstants.max_node_altitude:
            raise ValueError("Orbit altitude above the modeled 2,100 km ceiling.")

    @property
    def total_satellites(self) -> int:
        return self.plane_count * self.sats_per_plane

    @property
    def radius(self) -> float:
        return PhysicalConstants.R_E + self.altitude

    @property
    def angular_rate(self) -> float:
        """omega = sqrt(mu / r^3) [rad/s]"""
        return math.sqrt(PhysicalConstants.mu / self.radius ** 3)

    @property
    def period(self) -> float:
        """T = 2 pi sqrt(r^3 / mu) [s]"""
        return 2.0 * math.pi * math.sqrt(self.radius ** 3 / PhysicalConstants.mu)


@dataclass(frozen=True)
class FlightRoute:
    origin: GeodeticPoint
    destination: GeodeticPoint
    cruise_altitude: float = 11_000.0
    departure: float = 0.0
    speed: float = 250.0

    def __post_init__(self):
        if self.speed <= 0:
            raise ValueError("Aircraft speed must be positive.")
        if self.cruise_altitude < 0:
            raise ValueError("Cruise altitude cannot be negative.")
        angle = EarthGeometry.central_angle(self.origin, self.destination)
        if angle <= 0.0:
            raise ValueError("Flight origin and destination must differ.")
        if math.isclose(angle, math.pi, abs_tol=1e-12):
            raise ValueError("Antipodal routes have no unique great circle.")

    @property
    def ground_distance(self) -> float:
        return PhysicalConstants.R_E * EarthGeometry.central_angle(self.origin, self.destination)

    @property
    def arrival(self) -> float:
        return Kinematics.arrival_time(self)


class EarthGeometry:
    """Pure geometric relations on the spherical Earth."""

    @staticmethod
    def unit_vector(p: GeodeticPoint) -> np.ndarray:
        phi, lam = np.radians(p.latitude), np.radians(p.longitude)
        return np.array([np.cos(phi) * np.cos(lam), np.cos(phi) * np.sin(lam), np.sin(phi)])

    @staticmethod
    def geodetic_to_ecef(p: GeodeticPoint) -> EcefPosition:
        """x = R cos(phi) cos(lambda), y = R cos(phi) sin(lambda), z = R sin(phi)"""
        r = PhysicalConstants.R_E + p.altitude
        return EcefPosition.from_array(r * EarthGeometry.unit_vector(p))

    @staticmethod
    def ecef_to_geodetic(p: EcefPosition) -> GeodeticPoint:
        r = p.norm()
        if r == 0.0:
            raise ValueError("The Earth center has no geodetic coordinates.")
        lat = math.degrees(math.asin(max(-1.0, min(1.0, p.z / r))))
        lon = math.degrees(math.atan2(p.y, p.x))
        if lon <= -180.0:
            lon += 360.0
        return GeodeticPoint(lat, lon, max(0.0, r - PhysicalConstants.R_E))

    @staticmethod
    def central_angle(a: GeodeticPoint, b: GeodeticPoint) -> float:
        """Geocentric angle [rad] between two surface directions."""
        ua, ub = EarthGeometry.unit_vector(a), EarthGeometry.unit_vector(b)
        return float(np.arctan2(np.linalg.norm(np.cross(ua, ub)), np.dot(ua, ub)))

    @staticmethod
    def distance(a: EcefPosition, b: EcefPosition) -> float:
        return float(np.linalg.norm(a.as_array() - b.as_array()))

    @staticmethod
    def line_of_sight(a: EcefPosition, b: EcefPosition, clearance_altitude: float = 80_000.0) -> bool:
        """
        True iff the segment a-b stays at least R_E + clearance from the
        Earth's center. When an endpoint sits below the clearance shell
        (gateways, aircraft) the segment only has to clear the solid Earth.
        """
        pa, pb = a.as_array(), b.as_array()
        shell = PhysicalConstants.R_E + clearance_altitude
        if min(np.linalg.norm(pa), np.linalg.norm(pb)) < shell:
            shell = PhysicalConstants.R_E

        seg = pb - pa
        seg_len2 = float(np.dot(seg, seg))
        if seg_len2 == 0.0:
            return bool(np.linalg.norm(pa) >= shell - 1e-6)
        s = min(1.0, max(0.0, -float(np.dot(pa, seg)) / seg_len2))
        closest = pa + s * seg
        return bool(np.linalg.norm(closest) >= shell - 1e-6)

    @staticmethod
    def elevation_angle(ground: EcefPosition, sky: EcefPosition) -> float:
        """Angle [deg] of `sky` above the local horizontal plane at `ground`."""
        g = ground.as_array()
        v = sky.as_array() - g
        v_norm = np.linalg.norm(v)
        if v_norm == 0.0:
            return 90.0
        up = g / np.linalg.norm(g)
        sin_el = float(np.dot(v, up) / v_norm)
        return math.degrees(math.asin(max(-1.0, min(1.0, sin_el))))

    @staticmethod
    def propagation_latency(d: float) -> float:
        """L^c = d / c"""
        if d < 0:
            raise ValueError("Distance cannot be negative.")
        return d / PhysicalConstants.c


class Kinematics:
    """Positions of moving nodes as a function of time."""

    @staticmethod
    def propagate_satellite(shell: OrbitShell, plane: int, slot: int, t: float) -> EcefPosition:
        if not 0 <= plane < shell.plane_count:
            raise IndexError(f"Plane {plane} out of range [0, {shell.plane_count}).")
        if not 0 <= slot < shell.sats_per_plane:
            raise IndexError(f"Slot {slot} out of range [0, {shell.sats_per_plane}).")

        r = shell.radius
        raan = math.radians(shell.raan_origin + plane * shell.raan_spacing)
        inc = math.radians(shell.inclination)
        u0 = 2.0 * math.pi * slot / shell.sats_per_plane + math.radians(plane * shell.phase_offset)
        u = u0 + shell.angular_rate * (t - shell.epoch)

        cos_u, sin_u = math.cos(u), math.sin(u)
        cos_o, sin_o = math.cos(raan), math.sin(raan)
        return EcefPosition(
            r * (cos_o * cos_u - sin_o * sin_u * math.cos(inc)),
            r * (sin_o * cos_u + cos_o * sin_u * math.cos(inc)),
            r * (sin_u * math.sin(inc)),
        )

    @staticmethod
    def arrival_time(route: FlightRoute) -> float:
        return route.departure + route.ground_distance / route.speed

    @staticmethod
    def propagate_aircraft(route: FlightRoute, t: float) -> Optional[EcefPosition]:
        """Great-circle position at cruise altitude, or None when not airborne."""
        if t < route.departure:
            return None
        sigma = EarthGeometry.central_angle(route.origin, route.destination)
        travelled = route.speed * (t - route.departure)
        total = PhysicalConstants.R_E * sigma
        if travelled > total:
            return None

        f = travelled / total
        ua = EarthGeometry.unit_vector(route.origin)
        ub = EarthGeometry.unit_vector(route.destination)
        direction = (np.sin((1.0 - f) * sigma) * ua + np.sin(f * sigma) * ub) / np.sin(sigma)
        direction /= np.linalg.norm(direction)
        return EcefPosition.from_array((PhysicalConstants.R_E + route.cruise_altitude) * direction)
