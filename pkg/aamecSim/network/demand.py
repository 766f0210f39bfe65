"""
Traffic and workload models: IFECS flow demands of aircraft, satellite task
arrivals and offloading loads, and per-link latency terms.
"""

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from ..maths.constants import PhysicalConstants
from .nodes import MAX_PASSENGERS, MIN_PASSENGERS, AircraftNode, NodeId, NodeKind

if TYPE_CHECKING:
    from .topology import Snapshot

logger = logging.getLogger(__name__)

PASSENGER_MODE = 180


@dataclass(frozen=True)
class Service:
    """IFECS service class. Rates in bit/s, delay in s, packet size in bits."""
    name: str
    bandwidth_per_user: float
    delay_bound: float
    utilization: float
    packet_size: float

    def __post_init__(self):
        for field_name in ("bandwidth_per_user", "delay_bound", "packet_size"):
            if getattr(self, field_name) <= 0:
                raise ValueError(f"Service '{self.name}': {field_name} must be positive.")
        if not 0.0 < self.utilization <= 1.0:
            raise ValueError(f"Service '{self.name}': utilization must lie in (0, 1].")


DEFAULT_SERVICES: Tuple[Service, ...] = (
    Service("Web Service", 100e3, 0.500, 0.14, 933 * 8),
    Service("Online Gaming", 50e3, 0.060, 0.04, 24 * 8),
    Service("VoIP", 64e3, 0.100, 0.15, 829 * 8),
    Service("Video Streaming", 1.5e6, 0.300, 0.67, 1378 * 8),
)


@dataclass(frozen=True)
class PassengerModel:
    usage_ratio: float = 0.2     # rho_a

    def __post_init__(self):
        if not 0.0 < self.usage_ratio <= 1.0:
            raise ValueError("Passenger usage ratio must lie in (0, 1].")


@dataclass(frozen=True)
class Flow:
    """One service demand of one aircraft."""
    id: str
    source: NodeId
    service: Service
    demand: float           # D [bit/s]
    packet_size: float      # P [bit]
    delay_bound: float      # tau [s]


@dataclass(frozen=True)
class TaskModel:
    instructions: float = 25e6      # I per task
    data_size: float = 1.6e6        # D_T [bit] (0.2 MB)
    deadline: float = 1.0           # tau_s [s]

    def __post_init__(self):
        for field_name in ("instructions", "data_size", "deadline"):
            if getattr(self, field_name) <= 0:
                raise ValueError(f"Task model {field_name} must be positive.")


@dataclass(frozen=True)
class ProcessorSpec:
    name: str
    freq: float     # cycles/s
    ipc: float      # instructions/cycle/core
    cores: int

    def __post_init__(self):
        if self.freq <= 0 or self.ipc <= 0:
            raise ValueError(f"Processor '{self.name}': frequency and IPC must be positive.")
        if not isinstance(self.cores, int) or self.cores <= 0:
            raise ValueError(f"Processor '{self.name}': core count must be a positive integer.")

    @property
    def mips(self) -> float:
        """C = Freq * IPC * n_cores, in millions of instructions per second."""
        return round(self.freq * self.ipc * self.cores / 1e6, 6)

    def task_capacity(self, task_model: TaskModel) -> int:
        """Whole tasks per second."""
        return int(math.floor(self.mips * 1e6 / task_model.instructions + 1e-9))


CORTEX_A8 = ProcessorSpec("ARM Cortex-A8", 1.0e9, 2.0, 1)
CORTEX_A73 = ProcessorSpec("ARM Cortex-A73", 2.8e9, 6.35, 4)


@dataclass(frozen=True)
class SatTaskLoad:
    satellite: NodeId
    lam: float                  # lambda_s [tasks/s]
    arrivals: int               # J_s
    capacity: int               # C_s [tasks/s]
    offload: int                # O_s
    offload_bandwidth: float    # O^B_s [bit/s]


class TrafficModel:
    """Airborne IFECS demand."""

    @staticmethod
    def flow_demand(passengers: float, usage_ratio: float, service: Service) -> float:
        """D = B_m * U_m * N_a * rho_a"""
        if passengers < 0:
            raise ValueError("Passenger count cannot be negative.")
        return service.bandwidth_per_user * service.utilization * passengers * usage_ratio

    @staticmethod
    def build_flows(aircraft: Iterable[AircraftNode],
                    services: Sequence[Service],
                    passenger_model: PassengerModel = PassengerModel()) -> List[Flow]:
        flows = []
        for node in aircraft:
            for service in services:
                flows.append(Flow(
                    id=f"{node.node_id}/{service.name}",
                    source=node.node_id,
                    service=service,
                    demand=TrafficModel.flow_demand(node.passengers, passenger_model.usage_ratio, service),
                    packet_size=service.packet_size,
                    delay_bound=service.delay_bound,
                ))
        return flows

    @staticmethod
    def sample_passengers(rng: np.random.Generator) -> int:
        """Triangular draw on [132, 853] with mode 180."""
        value = rng.triangular(MIN_PASSENGERS, PASSENGER_MODE, MAX_PASSENGERS)
        return int(min(MAX_PASSENGERS, max(MIN_PASSENGERS, round(value))))


class ComputeModel:
    """Satellite workload and MEC processing."""

    @staticmethod
    def processor_capacity(spec: ProcessorSpec, task_model: TaskModel) -> Tuple[float, int]:
        """(MIPS, tasks/s)"""
        return spec.mips, spec.task_capacity(task_model)

    @staticmethod
    def task_rng(run_seed: int, satellite_index: int, snapshot_index: int) -> np.random.Generator:
        """Independent stream per (run, satellite, snapshot); order of use is irrelevant."""
        return np.random.default_rng([int(run_seed), int(satellite_index), int(snapshot_index)])

    @staticmethod
    def sample_task_arrivals(lam: float, rng: np.random.Generator) -> int:
        """J_s ~ Poisson(lambda_s). numpy uses inversion for small means and PTRS above."""
        if lam < 0:
            raise ValueError("Task arrival rate cannot be negative.")
        if lam == 0:
            return 0
        return int(rng.poisson(lam))

    @staticmethod
    def offload_load(arrivals: int, capacity: int, task_model: TaskModel) -> Tuple[int, float]:
        """O_s = max(J_s - C_s, 0), O^B_s = D_T * O_s / tau_s"""
        if arrivals < 0:
            raise ValueError("Task arrivals cannot be negative.")
        offload = max(int(arrivals) - int(capacity), 0)
        return offload, task_model.data_size * offload / task_model.deadline

    @staticmethod
    def mec_compute_latency(offload: float, mec: ProcessorSpec, task_model: TaskModel) -> float:
        """L^MEC = I * O_s / C^MEC"""
        if offload < 0:
            raise ValueError("Offloaded task count cannot be negative.")
        return task_model.instructions * offload / (mec.mips * 1e6)

    @staticmethod
    def build_task_loads(snapshot: "Snapshot", lam: float, run_seed: int,
                         processor: ProcessorSpec = CORTEX_A8,
                         task_model: TaskModel = TaskModel()) -> List[SatTaskLoad]:
        capacity = processor.task_capacity(task_model)
        loads = []
        for node_id in sorted(snapshot.nodes):
            node = snapshot.nodes[node_id]
            if node.kind is not NodeKind.SATELLITE:
                continue
            rng = ComputeModel.task_rng(run_seed, node.index, snapshot.index)
            arrivals = ComputeModel.sample_task_arrivals(lam, rng)
            offload, bandwidth = ComputeModel.offload_load(arrivals, capacity, task_model)
            loads.append(SatTaskLoad(node_id, lam, arrivals, capacity, offload, bandwidth))
        logger.debug("Snapshot %d: %d of %d satellites offload at lambda=%g",
                     snapshot.index, sum(1 for l in loads if l.offload > 0), len(loads), lam)
        return loads


class LatencyModel:
    """Per-link latency terms."""

    @staticmethod
    def transmission_latency(bits: float, capacity: float) -> float:
        """L' = D / B (flow) or P / B (packet)"""
        if capacity <= 0:
            raise ValueError("Link capacity must be positive (malformed topology).")
        return bits / capacity

    @staticmethod
    def link_total_latency(demand: float, packet_size: float, distance: float,
                           capacity: float) -> Tuple[float, float]:
        """(flow, packet) latency: transmission + 2 d / c round trip."""
        round_trip = 2.0 * distance / PhysicalConstants.c
        return (LatencyModel.transmission_latency(demand, capacity) + round_trip,
                LatencyModel.transmission_latency(packet_size, capacity) + round_trip)

    @staticmethod
    def analyze(demand: float, packet_size: float, distance: float, capacity: float) -> Dict[str, float]:
        """Latency breakdown of one commodity on one link."""
        flow, packet = LatencyModel.link_total_latency(demand, packet_size, distance, capacity)
        return {
            "Flow Transmission (s)": LatencyModel.transmission_latency(demand, capacity),
            "Packet Transmission (s)": LatencyModel.transmission_latency(packet_size, capacity),
            "Propagation (s)": distance / PhysicalConstants.c,
            "Flow Latency (s)": flow,
            "Packet Latency (s)": packet,
        }
