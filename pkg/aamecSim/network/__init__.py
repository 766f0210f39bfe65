"""
Network Model Module
====================

Contains:
- Node definitions (satellites, aircraft, gateways)
- Link typing and capacities
- Snapshot topology construction
- Traffic and workload demand
- Built-in scenarios
"""

from .nodes import (
    NodeId,
    NodeKind,
    NetworkNode,
    SatelliteNode,
    AircraftNode,
    GatewayNode,
    GatewaySite,
    FlightSpec,
)
from .classifier import LinkType, LinkClassifier, LINK_CAPACITY
from .demand import (
    Service,
    DEFAULT_SERVICES,
    Flow,
    PassengerModel,
    ProcessorSpec,
    CORTEX_A8,
    CORTEX_A73,
    TaskModel,
    SatTaskLoad,
    TrafficModel,
    ComputeModel,
    LatencyModel,
)
from .topology import (
    VisibilityThresholds,
    ExperimentSettings,
    Scenario,
    Link,
    Snapshot,
    TopologyBuilder,
    assign_mec_aircraft,
    snapshot_graph,
    export_snapshot,
)
from .scenarios import DEFAULT_GATEWAYS, iridium_shell, desk_scenario, desk_flights

__all__ = [
    "NodeId",
    "NodeKind",
    "NetworkNode",
    "SatelliteNode",
    "AircraftNode",
    "GatewayNode",
    "GatewaySite",
    "FlightSpec",
    "LinkType",
    "LinkClassifier",
    "LINK_CAPACITY",
    "Service",
    "DEFAULT_SERVICES",
    "Flow",
    "PassengerModel",
    "ProcessorSpec",
    "CORTEX_A8",
    "CORTEX_A73",
    "TaskModel",
    "SatTaskLoad",
    "TrafficModel",
    "ComputeModel",
    "LatencyModel",
    "VisibilityThresholds",
    "ExperimentSettings",
    "Scenario",
    "Link",
    "Snapshot",
    "TopologyBuilder",
    "assign_mec_aircraft",
    "snapshot_graph",
    "export_snapshot",
    "DEFAULT_GATEWAYS",
    "iridium_shell",
    "desk_scenario",
    "desk_flights",
]
