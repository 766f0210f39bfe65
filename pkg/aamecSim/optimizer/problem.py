"""
Materialized latency-minimization instances for one snapshot.

An instance holds directed arcs (two per physical link, each with the full
link capacity), commodities (aircraft service flows or satellite offload
loads) and, per commodity, its admissible MEC destinations. Decision
variables are implicit: a solution picks one destination and one simple path
per commodity; the gateway matching follows from the satellite->gateway arcs
in use.
"""

import json
import math
from dataclasses import asdict, dataclass, replace
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from ..maths.constants import PhysicalConstants
from ..network.demand import CORTEX_A73, ComputeModel, Flow, ProcessorSpec, SatTaskLoad, TaskModel
from ..network.nodes import NodeId, NodeKind
from ..network.topology import Snapshot
from .errors import MalformedInstanceError

FORMAT_VERSION = 1


class UseCase(str, Enum):
    AIRBORNE = "airborne"
    OFFLOAD = "offload"


@dataclass(frozen=True)
class Arc:
    tail: NodeId
    head: NodeId
    link_type: str
    distance: float     # m
    capacity: float     # bit/s, per direction

    @property
    def key(self) -> Tuple[NodeId, NodeId]:
        return (self.tail, self.head)


@dataclass(frozen=True)
class Commodity:
    """
    One routable demand.
    `demand` is both the capacity it consumes on every arc and the volume
    whose transmission enters the latency objective; `packet_size` enters the
    delay bound (for offloading both are O^B, the delay bound uses L).
    """
    id: str
    source: NodeId
    demand: float
    packet_size: float
    delay_bound: float
    label: str
    candidates: Tuple[NodeId, ...]
    compute: Tuple[Tuple[NodeId, float], ...] = ()
    tasks: int = 0

    def compute_latency(self, destination: NodeId) -> float:
        return self._compute_map.get(destination, 0.0)

    @cached_property
    def _compute_map(self) -> Dict[NodeId, float]:
        return dict(self.compute)


@dataclass(frozen=True)
class ProblemInstance:
    instance_id: str
    use_case: UseCase
    snapshot_index: int
    time: float
    node_kinds: Tuple[Tuple[NodeId, str], ...]
    mec_nodes: Tuple[NodeId, ...]
    arcs: Tuple[Arc, ...]
    commodities: Tuple[Commodity, ...]

    def __post_init__(self):
        kinds = dict(self.node_kinds)
        for arc in self.arcs:
            if arc.tail not in kinds or arc.head not in kinds:
                raise MalformedInstanceError(f"Arc {arc.key} references an unknown node.")
            if arc.tail == arc.head:
                raise MalformedInstanceError(f"Arc {arc.key} is a self-loop.")
            if not (math.isfinite(arc.distance) and arc.distance > 0):
                raise MalformedInstanceError(f"Arc {arc.key} has a non-positive distance.")
            if not (math.isfinite(arc.capacity) and arc.capacity > 0):
                raise MalformedInstanceError(f"Arc {arc.key} has zero capacity.")
        if len({a.key for a in self.arcs}) != len(self.arcs):
            raise MalformedInstanceError("Duplicate arcs.")

        mec = set(self.mec_nodes)
        seen = set()
        for k in self.commodities:
            if k.id in seen:
                raise MalformedInstanceError(f"Duplicate commodity id '{k.id}'.")
            seen.add(k.id)
            if k.source not in kinds:
                raise MalformedInstanceError(f"Commodity '{k.id}': source {k.source} absent from snapshot.")
            if k.demand <= 0 or k.packet_size <= 0 or k.delay_bound <= 0:
                raise MalformedInstanceError(f"Commodity '{k.id}': demand, packet size and bound must be positive.")
            for d in k.candidates:
                if d not in mec:
                    raise MalformedInstanceError(f"Commodity '{k.id}': candidate {d} is not MEC-capable.")
                if d == k.source:
                    raise MalformedInstanceError(f"Commodity '{k.id}': source cannot be its own destination.")

    # =========================
    # Lookups
    # =========================

    @cached_property
    def kind_of(self) -> Dict[NodeId, NodeKind]:
        return {n: NodeKind(k) for n, k in self.node_kinds}

    @cached_property
    def arc_map(self) -> Dict[Tuple[NodeId, NodeId], Arc]:
        return {a.key: a for a in self.arcs}

    @cached_property
    def commodity_map(self) -> Dict[str, Commodity]:
        return {k.id: k for k in self.commodities}

    @property
    def nodes(self) -> List[NodeId]:
        return [n for n, _ in self.node_kinds]

    def is_gated(self, arc: Arc) -> bool:
        """Satellite -> gateway arcs are governed by the gateway matching."""
        return (self.kind_of[arc.tail] is NodeKind.SATELLITE
                and self.kind_of[arc.head] is NodeKind.GATEWAY)

    def latency_weight(self, commodity: Commodity, arc: Arc) -> float:
        """L = D / B + 2 d / c"""
        return commodity.demand / arc.capacity + 2.0 * arc.distance / PhysicalConstants.c

    def delay_weight(self, commodity: Commodity, arc: Arc) -> float:
        """L^p = P / B + 2 d / c"""
        return commodity.packet_size / arc.capacity + 2.0 * arc.distance / PhysicalConstants.c

    # =========================
    # Derived instances
    # =========================

    def with_candidates(self, overrides: Mapping[str, Sequence[NodeId]]) -> "ProblemInstance":
        commodities = tuple(
            replace(k, candidates=tuple(overrides[k.id])) if k.id in overrides else k
            for k in self.commodities
        )
        return replace(self, commodities=commodities)

    def restricted_to(self, commodity_ids: Iterable[str]) -> "ProblemInstance":
        keep = set(commodity_ids)
        return replace(self, commodities=tuple(k for k in self.commodities if k.id in keep))

    # =========================
    # Serialization
    # =========================

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "instance_id": self.instance_id,
            "use_case": self.use_case.value,
            "snapshot_index": self.snapshot_index,
            "time": self.time,
            "nodes": [{"id": n, "kind": k} for n, k in self.node_kinds],
            "mec_nodes": list(self.mec_nodes),
            "arcs": [asdict(a) for a in self.arcs],
            "commodities": [
                {
                    "id": k.id, "source": k.source, "demand": k.demand,
                    "packet_size": k.packet_size, "delay_bound": k.delay_bound,
                    "label": k.label, "candidates": list(k.candidates),
                    "compute": {d: v for d, v in k.compute}, "tasks": k.tasks,
                    "arc_weights": {
                        f"{a.tail}>{a.head}": [self.latency_weight(k, a), self.delay_weight(k, a)]
                        for a in self.arcs
                    },
                }
                for k in self.commodities
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemInstance":
        try:
            if data.get("format") != FORMAT_VERSION:
                raise MalformedInstanceError(f"Unsupported instance format {data.get('format')!r}.")
            return cls(
                instance_id=str(data["instance_id"]),
                use_case=UseCase(data["use_case"]),
                snapshot_index=int(data["snapshot_index"]),
                time=float(data["time"]),
                node_kinds=tuple((n["id"], n["kind"]) for n in data["nodes"]),
                mec_nodes=tuple(data["mec_nodes"]),
                arcs=tuple(Arc(a["tail"], a["head"], a["link_type"], float(a["distance"]), float(a["capacity"]))
                           for a in data["arcs"]),
                commodities=tuple(
                    Commodity(
                        id=k["id"], source=k["source"], demand=float(k["demand"]),
                        packet_size=float(k["packet_size"]), delay_bound=float(k["delay_bound"]),
                        label=k["label"], candidates=tuple(k["candidates"]),
                        compute=tuple(sorted((d, float(v)) for d, v in k.get("compute", {}).items())),
                        tasks=int(k.get("tasks", 0)),
                    )
                    for k in data["commodities"]
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, MalformedInstanceError):
                raise
            raise MalformedInstanceError(f"Malformed instance document: {exc}") from exc


def _arcs_from_snapshot(snapshot: Snapshot) -> Tuple[Arc, ...]:
    arcs = []
    for link in snapshot.links:
        arcs.append(Arc(link.a, link.b, link.link_type.value, link.distance, link.capacity))
        arcs.append(Arc(link.b, link.a, link.link_type.value, link.distance, link.capacity))
    arcs.sort(key=lambda a: a.key)
    return tuple(arcs)


def _instance_id(use_case: UseCase, snapshot: Snapshot, tag: str) -> str:
    base = f"{use_case.value}-r{snapshot.index:03d}"
    return f"{base}-{tag}" if tag else base


def _mec_in_snapshot(snapshot: Snapshot, mec_nodes: Optional[Iterable[NodeId]]) -> Tuple[NodeId, ...]:
    pool = snapshot.mec_nodes if mec_nodes is None else mec_nodes
    return tuple(sorted(n for n in set(pool) if n in snapshot.positions))


def _node_kinds(snapshot: Snapshot) -> Tuple[Tuple[NodeId, str], ...]:
    return tuple((n, snapshot.kind(n).value) for n in sorted(snapshot.positions))


def build_airborne_problem(snapshot: Snapshot, flows: Sequence[Flow],
                           mec_nodes: Optional[Iterable[NodeId]] = None,
                           tag: str = "") -> ProblemInstance:
    """Destinations: MEC aircraft and gateways present in the snapshot, other than the source."""
    mec = _mec_in_snapshot(snapshot, mec_nodes)
    commodities = []
    for flow in flows:
        if flow.source not in snapshot.positions:
            raise MalformedInstanceError(f"Flow '{flow.id}': source {flow.source} absent from snapshot.")
        commodities.append(Commodity(
            id=flow.id,
            source=flow.source,
            demand=flow.demand,
            packet_size=flow.packet_size,
            delay_bound=flow.delay_bound,
            label=flow.service.name,
            candidates=tuple(d for d in mec if d != flow.source),
        ))
    return ProblemInstance(
        instance_id=_instance_id(UseCase.AIRBORNE, snapshot, tag),
        use_case=UseCase.AIRBORNE,
        snapshot_index=snapshot.index,
        time=snapshot.time,
        node_kinds=_node_kinds(snapshot),
        mec_nodes=mec,
        arcs=_arcs_from_snapshot(snapshot),
        commodities=tuple(commodities),
    )


def build_offload_problem(snapshot: Snapshot, loads: Sequence[SatTaskLoad],
                          mec_nodes: Optional[Iterable[NodeId]] = None,
                          task_model: TaskModel = TaskModel(),
                          processors: Optional[Mapping[NodeKind, ProcessorSpec]] = None,
                          tag: str = "") -> ProblemInstance:
    """Only satellites with O_s > 0 become commodities; the delay bound adds L^MEC per destination."""
    mec = _mec_in_snapshot(snapshot, mec_nodes)
    processors = dict(processors or {})
    commodities = []
    for load in loads:
        if load.satellite not in snapshot.positions:
            raise MalformedInstanceError(f"Load of {load.satellite}: satellite absent from snapshot.")
        if load.offload <= 0:
            continue
        compute = []
        for d in mec:
            spec = processors.get(snapshot.kind(d), CORTEX_A73)
            compute.append((d, ComputeModel.mec_compute_latency(load.offload, spec, task_model)))
        commodities.append(Commodity(
            id=f"{load.satellite}/offload",
            source=load.satellite,
            demand=load.offload_bandwidth,
            packet_size=load.offload_bandwidth,
            delay_bound=task_model.deadline,
            label=f"lambda={load.lam:g}",
            candidates=mec,
            compute=tuple(compute),
            tasks=load.offload,
        ))
    return ProblemInstance(
        instance_id=_instance_id(UseCase.OFFLOAD, snapshot, tag),
        use_case=UseCase.OFFLOAD,
        snapshot_index=snapshot.index,
        time=snapshot.time,
        node_kinds=_node_kinds(snapshot),
        mec_nodes=mec,
        arcs=_arcs_from_snapshot(snapshot),
        commodities=tuple(commodities),
    )


def dump_instance(problem: ProblemInstance, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(problem.to_dict(), indent=2, sort_keys=True))


def load_instance(path: Union[str, Path]) -> ProblemInstance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedInstanceError(f"{path}: not a JSON document ({exc}).") from exc
    return ProblemInstance.from_dict(data)
