"""
Per-snapshot network graph of the multi-layer (satellite, aerial, terrestrial)
network: node positions, typed capacitated links, ISL pattern and
visibility-gated access links.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

import networkx as nx
from networkx.readwrite import json_graph
import numpy as np

from ..maths.geom import EarthGeometry, EcefPosition, OrbitShell
from .classifier import LinkClassifier, LinkType
from .demand import CORTEX_A8, CORTEX_A73, DEFAULT_SERVICES, PassengerModel, ProcessorSpec, Service, TaskModel
from .nodes import (
    AircraftNode,
    FlightSpec,
    GatewayNode,
    GatewaySite,
    NetworkNode,
    NodeId,
    NodeKind,
    SatelliteNode,
)

logger = logging.getLogger(__name__)

# Stream key separating the MEC-aircraft permutation from other seeded draws
MEC_SAMPLING_STREAM = 7

HOUR = 3600.0


@dataclass(frozen=True)
class VisibilityThresholds:
    sat_ground_mask: float = 10.0       # deg, satellite seen from gateway or aircraft
    air_ground_mask: float = 5.0        # deg, aircraft seen from gateway (DA2G)
    air_air_range: float = 400e3        # m
    clearance_altitude: float = 80e3    # m, grazing cutoff for space-space links

    def __post_init__(self):
        for name in ("sat_ground_mask", "air_ground_mask"):
            if not -90.0 <= getattr(self, name) <= 90.0:
                raise ValueError(f"{name} must lie in [-90, 90] degrees.")
        if self.air_air_range <= 0:
            raise ValueError("air_air_range must be positive.")
        if self.clearance_altitude < 0:
            raise ValueError("clearance_altitude cannot be negative.")


@dataclass(frozen=True)
class ExperimentSettings:
    """Experiment grid and solver budget carried by a scenario file."""
    mec_ratios: Tuple[float, ...] = (0.0, 0.2, 0.4)
    lambda_grid: Tuple[float, ...] = (72.0, 76.0, 80.0)
    node_budget: int = 500_000
    time_budget: float = 120.0
    require_optimal: bool = False

    def __post_init__(self):
        for ratio in self.mec_ratios:
            if not 0.0 <= ratio <= 1.0:
                raise ValueError(f"mec_ratios entry {ratio} out of [0,1]")
        for lam in self.lambda_grid:
            if lam < 0:
                raise ValueError(f"lambda_grid entry {lam} is negative")
        if self.node_budget <= 0 or self.time_budget <= 0:
            raise ValueError("Solver budgets must be positive.")


@dataclass(frozen=True)
class Scenario:
    shell: OrbitShell
    gateways: Tuple[GatewaySite, ...]
    flights: Tuple[FlightSpec, ...]
    services: Tuple[Service, ...] = DEFAULT_SERVICES
    mec_aircraft_ratio: float = 0.2
    horizon: float = 4 * HOUR
    snapshot_interval: float = 300.0
    rng_seed: int = 1
    visibility: VisibilityThresholds = VisibilityThresholds()
    passenger_model: PassengerModel = PassengerModel()
    task_model: TaskModel = TaskModel()
    satellite_processor: ProcessorSpec = CORTEX_A8
    mec_processor: ProcessorSpec = CORTEX_A73
    experiment: ExperimentSettings = ExperimentSettings()

    def __post_init__(self):
        if not 0.0 <= self.mec_aircraft_ratio <= 1.0:
            raise ValueError("mec_aircraft_ratio out of [0,1]")
        if self.snapshot_interval <= 0:
            raise ValueError("snapshot_interval must be positive")
        if self.horizon < self.snapshot_interval:
            raise ValueError("horizon must be at least one snapshot_interval")
        names = [g.name for g in self.gateways]
        if len(set(names)) != len(names):
            raise ValueError("Gateway names must be unique.")
        if len({s.name for s in self.services}) != len(self.services):
            raise ValueError("Service names must be unique.")

    @property
    def snapshot_count(self) -> int:
        return int(math.floor(self.horizon / self.snapshot_interval + 1e-9)) + 1

    @cached_property
    def nodes(self) -> Dict[NodeId, NetworkNode]:
        """Every node of the scenario, airborne or not, keyed by id."""
        mec = assign_mec_aircraft(self)
        nodes: Dict[NodeId, NetworkNode] = {}
        for plane in range(self.shell.plane_count):
            for slot in range(self.shell.sats_per_plane):
                sat = SatelliteNode(self.shell, plane, slot)
                nodes[sat.node_id] = sat
        for index, flight in enumerate(self.flights):
            node_id = AircraftNode.make_id(index)
            nodes[node_id] = AircraftNode(index, flight, has_mec=node_id in mec)
        for site in self.gateways:
            gw = GatewayNode(site)
            nodes[gw.node_id] = gw
        return nodes


@dataclass(frozen=True)
class Link:
    a: NodeId
    b: NodeId
    link_type: LinkType
    distance: float
    capacity: float

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("Link endpoints must be distinct.")
        if self.distance <= 0:
            raise ValueError("Link distance must be positive.")
        if self.capacity != self.link_type.capacity:
            raise ValueError(f"{self.link_type.value} link must carry {self.link_type.capacity} bit/s.")

    @property
    def endpoints(self) -> Tuple[NodeId, NodeId]:
        return (self.a, self.b)


@dataclass(frozen=True)
class Snapshot:
    index: int
    time: float
    positions: Dict[NodeId, EcefPosition]
    links: Tuple[Link, ...]
    mec_nodes: FrozenSet[NodeId]
    nodes: Dict[NodeId, NetworkNode] = field(compare=False, repr=False)

    def kind(self, node_id: NodeId) -> NodeKind:
        return self.nodes[node_id].kind

    def ids_of(self, kind: NodeKind) -> List[NodeId]:
        return sorted(n for n, node in self.nodes.items() if node.kind is kind)

    def link_between(self, a: NodeId, b: NodeId) -> Optional[Link]:
        return self._link_index.get((a, b) if a < b else (b, a))

    def neighbors(self, node_id: NodeId) -> List[NodeId]:
        return sorted(
            (l.b if l.a == node_id else l.a) for l in self.links if node_id in (l.a, l.b)
        )

    @cached_property
    def _link_index(self) -> Dict[Tuple[NodeId, NodeId], Link]:
        return {(l.a, l.b): l for l in self.links}


class TopologyBuilder:
    """Builds snapshots of a scenario."""

    @staticmethod
    def select_isls(shell: OrbitShell, t: float = 0.0) -> Set[Tuple[NodeId, NodeId]]:
        """
        Two intra-plane neighbors (slot +-1, wrapping) and the same slot in
        each adjacent plane (plane +-1, no wrap across the seam).
        The pattern is stable, so `t` does not change it.
        """
        pairs: Set[Tuple[NodeId, NodeId]] = set()

        def add(a: NodeId, b: NodeId):
            if a != b:
                pairs.add((a, b) if a < b else (b, a))

        for plane in range(shell.plane_count):
            for slot in range(shell.sats_per_plane):
                here = SatelliteNode.make_id(plane, slot)
                add(here, SatelliteNode.make_id(plane, (slot + 1) % shell.sats_per_plane))
                if plane + 1 < shell.plane_count:
                    add(here, SatelliteNode.make_id(plane + 1, slot))
        return pairs

    @staticmethod
    def build_snapshot(scenario: Scenario, r: int) -> Snapshot:
        t = r * scenario.snapshot_interval
        if r < 0 or t > scenario.horizon + 1e-9:
            raise ValueError(f"Snapshot {r} lies outside the scenario horizon.")

        vis = scenario.visibility
        present: Dict[NodeId, NetworkNode] = {}
        positions: Dict[NodeId, EcefPosition] = {}
        for node_id, node in scenario.nodes.items():
            pos = node.position(t)
            if pos is None:
                continue
            present[node_id] = node
            positions[node_id] = pos

        sats = sorted(n for n, node in present.items() if node.kind is NodeKind.SATELLITE)
        air = sorted(n for n, node in present.items() if node.kind is NodeKind.AIRCRAFT)
        gws = sorted(n for n, node in present.items() if node.kind is NodeKind.GATEWAY)

        links: List[Link] = []

        def connect(a: NodeId, b: NodeId):
            distance = EarthGeometry.distance(positions[a], positions[b])
            if distance <= 0.0:
                return
            link_type = LinkClassifier.identify(present[a].kind, present[b].kind)
            if link_type is None:
                return
            lo, hi = (a, b) if a < b else (b, a)
            links.append(Link(lo, hi, link_type, distance, link_type.capacity))

        for a, b in sorted(TopologyBuilder.select_isls(scenario.shell, t)):
            connect(a, b)

        def visible(ground: NodeId, sky: NodeId, mask: float) -> bool:
            return (EarthGeometry.elevation_angle(positions[ground], positions[sky]) >= mask
                    and EarthGeometry.line_of_sight(positions[ground], positions[sky], vis.clearance_altitude))

        for sat in sats:
            for gw in gws:
                if visible(gw, sat, vis.sat_ground_mask):
                    connect(sat, gw)
            for plane in air:
                if visible(plane, sat, vis.sat_ground_mask):
                    connect(sat, plane)
        for a, b in combinations(air, 2):
            if (EarthGeometry.distance(positions[a], positions[b]) <= vis.air_air_range
                    and EarthGeometry.line_of_sight(positions[a], positions[b], vis.clearance_altitude)):
                connect(a, b)
        for plane in air:
            for gw in gws:
                if visible(gw, plane, vis.air_ground_mask):
                    connect(plane, gw)

        links.sort(key=lambda l: (l.a, l.b))
        mec = frozenset(n for n, node in present.items() if node.has_mec)
        logger.debug("Snapshot %d (t=%.0f s): %d nodes, %d links, %d MEC nodes",
                     r, t, len(present), len(links), len(mec))
        return Snapshot(r, t, positions, tuple(links), mec, present)

    @staticmethod
    def snapshot_series(scenario: Scenario) -> List[Snapshot]:
        """Snapshots at t = 0, dt, 2 dt, ... <= horizon."""
        return [TopologyBuilder.build_snapshot(scenario, r) for r in range(scenario.snapshot_count)]


def assign_mec_aircraft(scenario: Scenario) -> FrozenSet[NodeId]:
    """
    floor(ratio * n) aircraft taken as a prefix of one seeded permutation,
    so sets for nested ratios are nested.
    """
    ids = [AircraftNode.make_id(i) for i in range(len(scenario.flights))]
    count = int(math.floor(scenario.mec_aircraft_ratio * len(ids) + 1e-9))
    rng = np.random.default_rng([int(scenario.rng_seed), MEC_SAMPLING_STREAM])
    order = rng.permutation(len(ids))
    return frozenset(ids[i] for i in order[:count])


def snapshot_graph(snapshot: Snapshot) -> nx.Graph:
    """Undirected graph of one snapshot; node and link attributes in SI units and degrees."""
    graph = nx.Graph(index=snapshot.index, time=snapshot.time)
    for node_id in sorted(snapshot.positions):
        node = snapshot.nodes[node_id]
        p = snapshot.positions[node_id]
        geo = EarthGeometry.ecef_to_geodetic(p)
        graph.add_node(node_id, kind=node.kind.value, name=node.name, has_mec=node.has_mec,
                       position=[p.x, p.y, p.z], latitude=geo.latitude, longitude=geo.longitude,
                       altitude=geo.altitude)
    for link in snapshot.links:
        graph.add_edge(link.a, link.b, link_type=link.link_type.value,
                       distance=link.distance, capacity=link.capacity)
    return graph


def export_snapshot(snapshot: Snapshot) -> str:
    """
    networkx node-link JSON of `snapshot_graph`:
      {"graph": {"index", "time"}, "nodes": [{"id", "kind", "name", "has_mec",
       "position", "latitude", "longitude", "altitude"}],
       "links": [{"source", "target", "link_type", "distance", "capacity"}]}
    """
    document = json_graph.node_link_data(snapshot_graph(snapshot), edges="links")
    return json.dumps(document, indent=2, sort_keys=True)
