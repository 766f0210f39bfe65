"""
Independent feasibility check of a solution against the raw instance data
(arc distances and capacities, commodity demands and bounds). Nothing here
reuses the solver's graphs or weights.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

from ..maths.constants import PhysicalConstants
from ..network.nodes import NodeId, NodeKind
from .errors import MalformedInstanceError
from .problem import ProblemInstance
from .search import Solution

CAPACITY_SLACK = 1e-6
DELAY_TOL = 1e-12
OBJECTIVE_TOL = 1e-9

CHECKS = ("single_destination", "flow_conservation", "delay_bound", "bandwidth",
          "gateway_matching", "gateway_gating", "objective")


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    passed: bool
    violations: Tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    instance_id: str
    checks: Tuple[ConstraintCheck, ...]

    @property
    def feasible(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    def check(self, name: str) -> ConstraintCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def describe(self) -> str:
        lines = [f"Instance {self.instance_id}: {'feasible' if self.feasible else 'INFEASIBLE'}"]
        for c in self.checks:
            lines.append(f"  {c.name:<20} {'pass' if c.passed else 'FAIL'}")
            lines.extend(f"      {v}" for v in c.violations)
        return "\n".join(lines)


def _edges(path) -> List[Tuple[NodeId, NodeId]]:
    return list(zip(path[:-1], path[1:]))


def arc_loads(problem: ProblemInstance, solution: Solution) -> Dict[Tuple[NodeId, NodeId], float]:
    """Aggregated demand per directed arc (only arcs present in the instance)."""
    arcs = {(a.tail, a.head) for a in problem.arcs}
    demand = {k.id: k.demand for k in problem.commodities}
    loads: Dict[Tuple[NodeId, NodeId], float] = {}
    for a in solution.assignments:
        if a.commodity_id not in demand:
            continue
        for edge in _edges(a.path):
            if edge in arcs:
                loads[edge] = loads.get(edge, 0.0) + demand[a.commodity_id]
    return loads


def total_bandwidth(problem: ProblemInstance, solution: Solution) -> float:
    return math.fsum(arc_loads(problem, solution).values())


def validate_solution(problem: ProblemInstance, solution: Solution) -> ValidationReport:
    if solution.instance_id != problem.instance_id:
        raise MalformedInstanceError(
            f"Solution belongs to '{solution.instance_id}', not to '{problem.instance_id}'."
        )

    arcs = {(a.tail, a.head): a for a in problem.arcs}
    kinds = {n: NodeKind(k) for n, k in problem.node_kinds}
    commodities = {k.id: k for k in problem.commodities}
    found: Dict[str, List[str]] = {name: [] for name in CHECKS}

    def gated(edge) -> bool:
        return kinds.get(edge[0]) is NodeKind.SATELLITE and kinds.get(edge[1]) is NodeKind.GATEWAY

    counts: Dict[str, int] = {}
    for a in solution.assignments:
        counts[a.commodity_id] = counts.get(a.commodity_id, 0) + 1
    for cid in sorted(commodities):
        if counts.get(cid, 0) != 1:
            found["single_destination"].append(f"{cid}: assigned {counts.get(cid, 0)} times")
    for cid in sorted(set(counts) - set(commodities)):
        found["single_destination"].append(f"{cid}: unknown commodity")

    feeders: Dict[NodeId, set] = {}
    latencies = []
    for a in solution.assignments:
        k = commodities.get(a.commodity_id)
        if k is None:
            continue
        path = list(a.path)

        if not path or path[-1] != a.destination or a.destination not in k.candidates:
            found["single_destination"].append(f"{k.id}: destination {a.destination} not admissible")

        if not path or path[0] != k.source:
            found["flow_conservation"].append(f"{k.id}: path does not start at source {k.source}")
        if len(set(path)) != len(path):
            found["flow_conservation"].append(f"{k.id}: path revisits a node")
        missing = [e for e in _edges(path) if e not in arcs]
        for tail, head in missing:
            found["flow_conservation"].append(f"{k.id}: edge {tail}->{head} absent from snapshot")

        delay = latency = 0.0
        for position, edge in enumerate(_edges(path)):
            arc = arcs.get(edge)
            if arc is None:
                continue
            round_trip = 2.0 * arc.distance / PhysicalConstants.c
            delay += k.packet_size / arc.capacity + round_trip
            latency += k.demand / arc.capacity + round_trip
            if gated(edge):
                feeders.setdefault(edge[1], set()).add(edge[0])
                if position != len(path) - 2 or edge[1] != a.destination:
                    found["gateway_gating"].append(
                        f"{k.id}: uses {edge[0]}->{edge[1]} but ends at {a.destination}"
                    )
        compute = dict(k.compute).get(a.destination, 0.0)
        delay += compute
        latency += compute
        if not missing and delay > k.delay_bound + DELAY_TOL:
            found["delay_bound"].append(f"{k.id}: delay {delay:.9g} s > bound {k.delay_bound:.9g} s")
        latencies.append(latency)

    for edge, load in sorted(arc_loads(problem, solution).items()):
        capacity = arcs[edge].capacity
        if load > capacity * (1.0 + CAPACITY_SLACK):
            found["bandwidth"].append(f"arc {edge[0]}->{edge[1]}: load {load:.9g} > capacity {capacity:.9g} bit/s")

    declared = dict(solution.matching)
    for g, sats in sorted(feeders.items()):
        if len(sats) > 1:
            found["gateway_matching"].append(f"gateway {g} fed by {sorted(sats)}")
        elif declared.get(g) not in sats:
            found["gateway_matching"].append(f"gateway {g}: declared feeder {declared.get(g)} unused")

    objective = math.fsum(latencies)
    if abs(objective - solution.objective) > OBJECTIVE_TOL + 1e-12 * abs(objective):
        found["objective"].append(f"reported {solution.objective:.12g} s, recomputed {objective:.12g} s")

    checks = tuple(ConstraintCheck(name, not found[name], tuple(found[name])) for name in CHECKS)
    return ValidationReport(problem.instance_id, checks)
