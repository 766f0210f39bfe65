"""
Exact solver: depth-first branch-and-bound.

The outer tree fixes, gateway by gateway, the single satellite allowed to
feed it (the matching q). At a complete matching an inner depth-first search
routes commodities in canonical order (descending demand, then id), trying
each commodity's simple routes in nondecreasing latency on the residual
graph and undoing on return, which covers every routing order the
sequential router could need. Bounds at both levels are the sum of
capacity-ignoring, delay-feasible shortest-path latencies under the current
partial matching. A greedy solution seeds the incumbent.

Ties between equal objectives (within 1e-12 s) go to the solution whose
(destination, path) sequence, listed by commodity id, is smallest.
"""

import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ..maths.constants import PhysicalConstants
from ..network.nodes import NodeId
from ..network.topology import ExperimentSettings
from .errors import BudgetExceededError, InfeasibleError, MalformedInstanceError
from .problem import Commodity, ProblemInstance, UseCase
from .routing import (TOL, ArcKey, Route, lower_bound, ranked_routes, route_cost, route_delay,
                      routing_graph, shortest_feasible_route)

logger = logging.getLogger(__name__)

TIME_CHECK_EVERY = 256


@dataclass(frozen=True)
class SolveLimits:
    node_budget: int = 500_000
    time_budget: float = 120.0      # s
    require_optimal: bool = False

    def __post_init__(self):
        if not isinstance(self.node_budget, int) or self.node_budget <= 0:
            raise ValueError("Node budget must be a positive integer.")
        if not self.time_budget > 0:
            raise ValueError("Time budget must be positive.")

    @classmethod
    def from_settings(cls, settings: ExperimentSettings) -> "SolveLimits":
        return cls(settings.node_budget, settings.time_budget, settings.require_optimal)


@dataclass(frozen=True)
class CommodityAssignment:
    commodity_id: str
    destination: NodeId
    path: Tuple[NodeId, ...]
    latency: float          # s, objective contribution
    propagation: float      # s, sum of 2 d / c
    transmission: float     # s, sum of D / B
    compute: float          # s, L^MEC (0 for airborne flows)
    packet_delay: float     # s, left side of the delay bound

    @property
    def hops(self) -> int:
        return len(self.path) - 1


@dataclass(frozen=True)
class Solution:
    instance_id: str
    use_case: UseCase
    assignments: Tuple[CommodityAssignment, ...]
    matching: Tuple[Tuple[NodeId, NodeId], ...]     # (gateway, satellite)
    objective: float
    optimal: bool
    gap: Optional[float] = None
    nodes_explored: int = 0
    _index: Dict[str, CommodityAssignment] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {a.commodity_id: a for a in self.assignments})

    def assignment(self, commodity_id: str) -> CommodityAssignment:
        return self._index[commodity_id]

    def destination_of(self, commodity_id: str) -> NodeId:
        return self._index[commodity_id].destination

    @property
    def destinations(self) -> Dict[str, NodeId]:
        return {a.commodity_id: a.destination for a in self.assignments}

    @property
    def tie_key(self) -> Tuple[Tuple[NodeId, Tuple[NodeId, ...]], ...]:
        return tuple((a.destination, a.path) for a in self.assignments)

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "use_case": self.use_case.value,
            "objective": self.objective,
            "optimal": self.optimal,
            "gap": self.gap,
            "nodes_explored": self.nodes_explored,
            "matching": {g: s for g, s in self.matching},
            "assignments": [
                {
                    "commodity": a.commodity_id, "destination": a.destination, "path": list(a.path),
                    "latency": a.latency, "propagation": a.propagation,
                    "transmission": a.transmission, "compute": a.compute,
                    "packet_delay": a.packet_delay,
                }
                for a in self.assignments
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Solution":
        try:
            return cls(
                instance_id=str(data["instance_id"]),
                use_case=UseCase(data["use_case"]),
                assignments=tuple(
                    CommodityAssignment(
                        commodity_id=a["commodity"], destination=a["destination"], path=tuple(a["path"]),
                        latency=float(a["latency"]), propagation=float(a["propagation"]),
                        transmission=float(a["transmission"]), compute=float(a["compute"]),
                        packet_delay=float(a["packet_delay"]),
                    )
                    for a in data["assignments"]
                ),
                matching=tuple(sorted(data.get("matching", {}).items())),
                objective=float(data["objective"]),
                optimal=bool(data["optimal"]),
                gap=None if data.get("gap") is None else float(data["gap"]),
                nodes_explored=int(data.get("nodes_explored", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInstanceError(f"Malformed solution document: {exc}") from exc


# =========================
# Building solutions
# =========================

def canonical_order(problem: ProblemInstance) -> List[Commodity]:
    return sorted(problem.commodities, key=lambda k: (-k.demand, k.id))


def latency_breakdown(problem: ProblemInstance, commodity: Commodity,
                      path: Tuple[NodeId, ...]) -> CommodityAssignment:
    propagation = transmission = 0.0
    for key in zip(path[:-1], path[1:]):
        arc = problem.arc_map[key]
        transmission += commodity.demand / arc.capacity
        propagation += 2.0 * arc.distance / PhysicalConstants.c
    return CommodityAssignment(
        commodity_id=commodity.id,
        destination=path[-1],
        path=tuple(path),
        latency=route_cost(problem, commodity, path),
        propagation=propagation,
        transmission=transmission,
        compute=commodity.compute_latency(path[-1]),
        packet_delay=route_delay(problem, commodity, path),
    )


def assignment_objective(problem: ProblemInstance, paths: Mapping[str, Tuple[NodeId, ...]]) -> float:
    """Sum of per-commodity latencies, accumulated in commodity-id order."""
    return math.fsum(route_cost(problem, problem.commodity_map[cid], paths[cid]) for cid in sorted(paths))


def assignment_key(paths: Mapping[str, Tuple[NodeId, ...]]) -> Tuple[Tuple[NodeId, Tuple[NodeId, ...]], ...]:
    return tuple((paths[cid][-1], tuple(paths[cid])) for cid in sorted(paths))


def derive_matching(problem: ProblemInstance, paths: Mapping[str, Tuple[NodeId, ...]]) -> Dict[NodeId, NodeId]:
    matching: Dict[NodeId, NodeId] = {}
    for path in paths.values():
        for key in zip(path[:-1], path[1:]):
            arc = problem.arc_map.get(key)
            if arc is not None and problem.is_gated(arc):
                matching[arc.head] = arc.tail
    return matching


def make_solution(problem: ProblemInstance, paths: Mapping[str, Tuple[NodeId, ...]],
                  optimal: bool, gap: Optional[float] = None, nodes_explored: int = 0) -> Solution:
    assignments = tuple(
        latency_breakdown(problem, problem.commodity_map[cid], tuple(paths[cid])) for cid in sorted(paths)
    )
    return Solution(
        instance_id=problem.instance_id,
        use_case=problem.use_case,
        assignments=assignments,
        matching=tuple(sorted(derive_matching(problem, paths).items())),
        objective=assignment_objective(problem, paths),
        optimal=optimal,
        gap=gap,
        nodes_explored=nodes_explored,
    )


def is_better(objective: float, key, best_objective: float, best_key) -> bool:
    if best_key is None or objective < best_objective - TOL:
        return True
    return abs(objective - best_objective) <= TOL and key < best_key


# =========================
# Heuristic and screening
# =========================

def _apply(problem: ProblemInstance, commodity: Commodity, route: Route,
           loads: Dict[ArcKey, float], sign: float = 1.0):
    for key in route.arcs:
        loads[key] = loads.get(key, 0.0) + sign * commodity.demand


def greedy_heuristic(problem: ProblemInstance) -> Solution:
    """
    Commodities in canonical order, each on its delay-feasible minimum-latency
    route over residual capacities; the first satellite to feed a gateway
    claims it. Incomplete: raises InfeasibleError when a commodity cannot be
    placed even if the instance is feasible.
    """
    loads: Dict[ArcKey, float] = {}
    matching: Dict[NodeId, NodeId] = {}
    paths: Dict[str, Tuple[NodeId, ...]] = {}
    for commodity in canonical_order(problem):
        graph = routing_graph(problem, commodity, loads, matching)
        route = shortest_feasible_route(problem, commodity, graph)
        if route is None:
            raise InfeasibleError(f"Greedy placement failed for '{commodity.id}'.", [commodity.id])
        _apply(problem, commodity, route, loads)
        matching.update(derive_matching(problem, {commodity.id: route.path}))
        paths[commodity.id] = route.path
    return make_solution(problem, paths, optimal=False)


def screen_commodities(problem: ProblemInstance) -> Tuple[ProblemInstance, Dict[str, str]]:
    """Split off commodities with no delay-feasible route even on an empty network."""
    rejected: Dict[str, str] = {}
    for commodity in problem.commodities:
        if not commodity.candidates:
            rejected[commodity.id] = "no_candidates"
        elif math.isinf(lower_bound(problem, commodity)):
            rejected[commodity.id] = "no_feasible_path"
    if not rejected:
        return problem, rejected
    keep = [k.id for k in problem.commodities if k.id not in rejected]
    return problem.restricted_to(keep), rejected


# =========================
# Branch and bound
# =========================

class _Interrupted(Exception):
    pass


class BranchAndBound:
    """One exact solve; not reusable across instances."""

    def __init__(self, problem: ProblemInstance, limits: SolveLimits):
        self.problem = problem
        self.limits = limits
        self.order = canonical_order(problem)
        self.nodes_explored = 0
        self.best_objective = math.inf
        self.best_key = None
        self.best_paths: Optional[Dict[str, Tuple[NodeId, ...]]] = None
        self._bound_cache: Dict[Tuple[str, Tuple[Tuple[NodeId, NodeId], ...]], float] = {}
        self._started = 0.0

        wanted = {d for k in problem.commodities for d in k.candidates}
        feeders: Dict[NodeId, List[NodeId]] = {}
        for arc in problem.arcs:
            if problem.is_gated(arc) and arc.head in wanted:
                feeders.setdefault(arc.head, []).append(arc.tail)
        self.feeders = {g: sorted(s) for g, s in sorted(feeders.items())}
        self.gateways = list(self.feeders)

    # ---- bookkeeping ----

    def _tick(self):
        self.nodes_explored += 1
        if self.nodes_explored > self.limits.node_budget:
            raise _Interrupted()
        if self.nodes_explored % TIME_CHECK_EVERY == 0:
            if time.perf_counter() - self._started > self.limits.time_budget:
                raise _Interrupted()

    def _offer(self, paths: Mapping[str, Tuple[NodeId, ...]]):
        objective = assignment_objective(self.problem, paths)
        key = assignment_key(paths)
        if is_better(objective, key, self.best_objective, self.best_key):
            self.best_objective, self.best_key, self.best_paths = objective, key, dict(paths)

    def _bounds(self, q: Mapping[NodeId, NodeId]) -> List[float]:
        bounds = []
        for commodity in self.order:
            relevant = tuple(sorted((g, s) for g, s in q.items() if g in commodity.candidates))
            cache_key = (commodity.id, relevant)
            if cache_key not in self._bound_cache:
                self._bound_cache[cache_key] = lower_bound(self.problem, commodity, dict(relevant))
            bounds.append(self._bound_cache[cache_key])
        return bounds

    def _prunable(self, bound: float) -> bool:
        return bound > self.best_objective + TOL

    # ---- search ----

    def _match(self, level: int, q: Dict[NodeId, NodeId]):
        self._tick()
        bounds = self._bounds(q)
        total = math.fsum(bounds)
        if math.isinf(total) or self._prunable(total):
            return
        if level == len(self.gateways):
            rest = [0.0] * (len(self.order) + 1)
            for i in range(len(self.order) - 1, -1, -1):
                rest[i] = rest[i + 1] + bounds[i]
            self._route(0, q, 0.0, {}, {}, rest)
            return

        g = self.gateways[level]
        children = []
        for s in self.feeders[g]:
            q[g] = s
            children.append((math.fsum(self._bounds(q)), s))
            del q[g]
        for _, s in sorted(children):
            q[g] = s
            self._match(level + 1, q)
            del q[g]

    def _route(self, i: int, q: Mapping[NodeId, NodeId], partial: float,
               loads: Dict[ArcKey, float], paths: Dict[str, Tuple[NodeId, ...]], rest: Sequence[float]):
        if i == len(self.order):
            self._offer(paths)
            return
        commodity = self.order[i]
        graph = routing_graph(self.problem, commodity, loads, q)
        for route in ranked_routes(self.problem, commodity, graph):
            self._tick()
            if self._prunable(partial + route.cost + rest[i + 1]):
                break
            if route.delay > commodity.delay_bound + TOL:
                continue
            _apply(self.problem, commodity, route, loads)
            paths[commodity.id] = route.path
            self._route(i + 1, q, partial + route.cost, loads, paths, rest)
            del paths[commodity.id]
            _apply(self.problem, commodity, route, loads, sign=-1.0)

    def run(self) -> Solution:
        problem = self.problem
        self._started = time.perf_counter()

        root = self._bounds({})
        unroutable = [k.id for k, b in zip(self.order, root) if math.isinf(b)]
        if unroutable:
            raise InfeasibleError(f"{len(unroutable)} commodities have no delay-feasible route.", sorted(unroutable))
        root_bound = math.fsum(root)

        try:
            seed = greedy_heuristic(problem)
            self._offer({a.commodity_id: a.path for a in seed.assignments})
        except InfeasibleError:
            logger.debug("%s: greedy found no incumbent", problem.instance_id)

        interrupted = False
        try:
            self._match(0, {})
        except _Interrupted:
            interrupted = True

        if self.best_paths is None:
            if interrupted:
                raise BudgetExceededError(f"{problem.instance_id}: budget exhausted without an incumbent.")
            raise InfeasibleError(f"{problem.instance_id}: no assignment satisfies all constraints.",
                                  sorted(k.id for k in problem.commodities))

        if not interrupted:
            logger.debug("%s: optimal %.9g s after %d nodes", problem.instance_id,
                         self.best_objective, self.nodes_explored)
            return make_solution(problem, self.best_paths, True, 0.0, self.nodes_explored)

        gap = max(0.0, (self.best_objective - root_bound) / self.best_objective) if self.best_objective > 0 else 0.0
        incumbent = make_solution(problem, self.best_paths, False, gap, self.nodes_explored)
        logger.warning("%s: budget exhausted after %d nodes, gap %.3g", problem.instance_id,
                       self.nodes_explored, gap)
        if self.limits.require_optimal:
            raise BudgetExceededError(f"{problem.instance_id}: budget exhausted (gap {gap:.3g}).", incumbent, gap)
        return incumbent


def solve_exact(problem: ProblemInstance, limits: SolveLimits = SolveLimits()) -> Solution:
    if not problem.commodities:
        return make_solution(problem, {}, optimal=True, gap=0.0)
    return BranchAndBound(problem, limits).run()


def dump_solution(solution: Solution, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(solution.to_dict(), indent=2, sort_keys=True))


def load_solution(path: Union[str, Path]) -> Solution:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedInstanceError(f"{path}: not a JSON document ({exc}).") from exc
    return Solution.from_dict(data)
