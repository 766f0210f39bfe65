"""
Built-in scenario data: the Iridium-Next shell, its ten gateways and a small
desk scenario whose flights and gateways lie under a single orbital plane.
"""

from dataclasses import replace
from typing import Optional, Sequence, Tuple

from ..maths.geom import FlightRoute, GeodeticPoint, OrbitShell
from .nodes import FlightSpec, GatewaySite
from .topology import HOUR, ExperimentSettings, Scenario

IRIDIUM_ALTITUDE = 781e3
IRIDIUM_INCLINATION = 86.4

DEFAULT_GATEWAYS: Tuple[GatewaySite, ...] = (
    GatewaySite("Beijing", GeodeticPoint(39.92, 116.388), "China"),
    GatewaySite("Fairbanks", GeodeticPoint(64.838, -147.716), "USA"),
    GatewaySite("Iqaluit", GeodeticPoint(63.733, -68.500), "Canada"),
    GatewaySite("Ischewsk", GeodeticPoint(56.850, 53.204), "Russia"),
    GatewaySite("Longyearbyen", GeodeticPoint(79.0, 17.66), "Norway"),
    GatewaySite("Punta Arenas", GeodeticPoint(-53.315, -71.580), "Chile"),
    GatewaySite("Rome", GeodeticPoint(41.9, 12.483), "Italy"),
    GatewaySite("Tempe", GeodeticPoint(33.415, -111.909), "USA"),
    GatewaySite("Wahiawa", GeodeticPoint(21.503, -158.024), "USA"),
    GatewaySite("Yellowknife", GeodeticPoint(62.450, -114.350), "Canada"),
)


def iridium_shell(plane_count: int = 6, sats_per_plane: int = 11, raan_origin: float = 0.0) -> OrbitShell:
    """Walker-star shell: planes spread over 180 deg, half-slot phasing between planes."""
    return OrbitShell(
        plane_count=plane_count,
        sats_per_plane=sats_per_plane,
        altitude=IRIDIUM_ALTITUDE,
        inclination=IRIDIUM_INCLINATION,
        raan_spacing=180.0 / plane_count,
        phase_offset=180.0 / sats_per_plane,
        raan_origin=raan_origin,
    )


def gateway(name: str) -> GatewaySite:
    for site in DEFAULT_GATEWAYS:
        if site.name == name:
            return site
    raise KeyError(f"No built-in gateway named '{name}'.")


# Gateways within the coverage band of a plane with RAAN 12.5 deg
DESK_GATEWAYS = ("Fairbanks", "Longyearbyen", "Rome", "Wahiawa")

# (name, origin, destination, departure [min], passengers)
_DESK_FLIGHTS = (
    ("Rome-Oslo", (41.80, 12.25), (60.19, 11.10), 0, 180),
    ("Oslo-Rome", (60.19, 11.10), (41.80, 12.25), 5, 150),
    ("Tunis-Tromso", (36.85, 10.23), (69.68, 18.92), 0, 220),
    ("Palermo-Copenhagen", (38.18, 13.10), (55.62, 12.65), 10, 132),
    ("Munich-Longyearbyen", (48.35, 11.78), (78.25, 15.47), 0, 180),
    ("Honolulu-Anchorage", (21.32, -157.92), (61.17, -149.99), 0, 300),
    ("Anchorage-Honolulu", (61.17, -149.99), (21.32, -157.92), 10, 200),
    ("Fairbanks-Honolulu", (64.82, -147.86), (21.32, -157.92), 0, 160),
    ("Hilo-Anchorage", (19.72, -155.05), (61.17, -149.99), 15, 250),
    ("Honolulu-Fairbanks", (21.32, -157.92), (64.82, -147.86), 5, 180),
)


def desk_flights(count: int = 10, cruise_altitude: float = 11_000.0, speed: float = 250.0) -> Tuple[FlightSpec, ...]:
    if not 0 < count <= len(_DESK_FLIGHTS):
        raise ValueError(f"Desk scenario offers 1..{len(_DESK_FLIGHTS)} flights.")
    flights = []
    for name, origin, destination, departure_min, passengers in _DESK_FLIGHTS[:count]:
        route = FlightRoute(
            origin=GeodeticPoint(*origin),
            destination=GeodeticPoint(*destination),
            cruise_altitude=cruise_altitude,
            departure=departure_min * 60.0,
            speed=speed,
        )
        flights.append(FlightSpec(name, route, passengers))
    return tuple(flights)


def desk_scenario(seed: int = 1,
                  flight_count: int = 10,
                  horizon: float = 2 * HOUR,
                  mec_aircraft_ratio: float = 0.2,
                  gateway_names: Sequence[str] = DESK_GATEWAYS,
                  experiment: Optional[ExperimentSettings] = None) -> Scenario:
    """One plane of eleven satellites, up to ten flights, four gateways, 5-minute snapshots."""
    scenario = Scenario(
        shell=iridium_shell(plane_count=1, sats_per_plane=11, raan_origin=12.5),
        gateways=tuple(gateway(name) for name in gateway_names),
        flights=desk_flights(flight_count),
        mec_aircraft_ratio=mec_aircraft_ratio,
        horizon=horizon,
        snapshot_interval=300.0,
        rng_seed=seed,
    )
    if experiment is not None:
        scenario = replace(scenario, experiment=experiment)
    return scenario
