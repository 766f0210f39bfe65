from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..maths.geom import (
    EarthGeometry,
    EcefPosition,
    FlightRoute,
    GeodeticPoint,
    Kinematics,
    OrbitShell,
)

NodeId = str

MIN_PASSENGERS = 132
MAX_PASSENGERS = 853


class NodeKind(str, Enum):
    SATELLITE = "satellite"
    AIRCRAFT = "aircraft"
    GATEWAY = "gateway"


@dataclass(frozen=True)
class GatewaySite:
    """Terrestrial gateway as listed in a scenario."""
    name: str
    location: GeodeticPoint
    country: str = ""


@dataclass(frozen=True)
class FlightSpec:
    """One scheduled flight of a scenario."""
    name: str
    route: FlightRoute
    passengers: int

    def __post_init__(self):
        if not isinstance(self.passengers, int) or isinstance(self.passengers, bool):
            raise TypeError("Passenger count must be an integer.")
        if not MIN_PASSENGERS <= self.passengers <= MAX_PASSENGERS:
            raise ValueError(
                f"Passenger count {self.passengers} outside [{MIN_PASSENGERS}, {MAX_PASSENGERS}]."
            )


class NetworkNode(ABC):
    """Abstract base class implementing shared node logic."""

    kind: NodeKind

    def __init__(self, node_id: NodeId, name: str):
        if not isinstance(node_id, str) or not node_id:
            raise TypeError("Node id must be a non-empty string.")
        self.node_id = node_id
        self.name = name

    # =========================
    # Central Validation
    # =========================

    def _validate_index(self, value: int, name: str):
        if not isinstance(value, int) or isinstance(value, bool):
            raise TypeError(f"{name} must be an integer.")
        if value < 0:
            raise ValueError(f"{name} cannot be negative.")

    # =========================
    # Child Must Implement
    # =========================

    @abstractmethod
    def position(self, t: float) -> Optional[EcefPosition]:
        pass

    @property
    @abstractmethod
    def has_mec(self) -> bool:
        pass

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.node_id!r})"


class SatelliteNode(NetworkNode):
    """Satellite on a circular orbit of the shell. Never hosts a MEC server."""
    kind = NodeKind.SATELLITE

    def __init__(self, shell: OrbitShell, plane: int, slot: int):
        self._validate_index(plane, "Plane")
        self._validate_index(slot, "Slot")
        super().__init__(SatelliteNode.make_id(plane, slot), f"Satellite {plane}/{slot}")
        self.shell = shell
        self.plane = plane
        self.slot = slot

    @staticmethod
    def make_id(plane: int, slot: int) -> NodeId:
        return f"SAT-{plane:02d}-{slot:02d}"

    @property
    def index(self) -> int:
        """Flat index, used as the satellite's random-stream key."""
        return self.plane * self.shell.sats_per_plane + self.slot

    @property
    def has_mec(self) -> bool:
        return False

    def position(self, t: float) -> EcefPosition:
        return Kinematics.propagate_satellite(self.shell, self.plane, self.slot, t)


class AircraftNode(NetworkNode):
    """Passenger aircraft; server aircraft additionally carry a MEC server."""
    kind = NodeKind.AIRCRAFT

    def __init__(self, index: int, flight: FlightSpec, has_mec: bool = False):
        self._validate_index(index, "Aircraft index")
        super().__init__(AircraftNode.make_id(index), flight.name)
        self.index = index
        self.flight = flight
        self._has_mec = bool(has_mec)

    @staticmethod
    def make_id(index: int) -> NodeId:
        return f"AIR-{index:03d}"

    @property
    def passengers(self) -> int:
        return self.flight.passengers

    @property
    def route(self) -> FlightRoute:
        return self.flight.route

    @property
    def has_mec(self) -> bool:
        return self._has_mec

    def position(self, t: float) -> Optional[EcefPosition]:
        return Kinematics.propagate_aircraft(self.flight.route, t)


class GatewayNode(NetworkNode):
    """Satellite gateway. Every gateway deploys a MEC server."""
    kind = NodeKind.GATEWAY

    def __init__(self, site: GatewaySite):
        super().__init__(GatewayNode.make_id(site.name), site.name)
        self.site = site
        self._position = EarthGeometry.geodetic_to_ecef(site.location)

    @staticmethod
    def make_id(name: str) -> NodeId:
        return "GW-" + "_".join(name.split())

    @property
    def location(self) -> GeodeticPoint:
        return self.site.location

    @property
    def has_mec(self) -> bool:
        return True

    def position(self, t: float) -> EcefPosition:
        return self._position
