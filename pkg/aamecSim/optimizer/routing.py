"""
Per-commodity routing graphs and the two path subroutines used by the
search: label-setting delay-bounded shortest paths and ranked simple paths.

Each commodity is routed on an expanded digraph. Original nodes keep their
ids; every admissible destination d gets an edge d -> SINK weighted with its
compute latency; a satellite->gateway arc s -> g is redirected to a feeder
node "g#feeder" whose only edge leads to SINK, so such an arc can only be the
last hop of a commodity destined to g.
"""

import heapq
import math
from dataclasses import dataclass
from itertools import islice
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

import networkx as nx

from ..network.nodes import NodeId
from .problem import Arc, Commodity, ProblemInstance

SINK = "~sink"
FEEDER_SUFFIX = "#feeder"
CAPACITY_SLACK = 1e-6
TOL = 1e-12

ArcKey = Tuple[NodeId, NodeId]


@dataclass(frozen=True)
class Route:
    destination: NodeId
    path: Tuple[NodeId, ...]
    cost: float         # sum of L over arcs + compute latency
    delay: float        # sum of L^p over arcs + compute latency

    @property
    def arcs(self) -> List[ArcKey]:
        return list(zip(self.path[:-1], self.path[1:]))


def feeder(gateway: NodeId) -> str:
    return gateway + FEEDER_SUFFIX


def fits(arc: Arc, load: float) -> bool:
    return load <= arc.capacity * (1.0 + CAPACITY_SLACK)


def route_cost(problem: ProblemInstance, commodity: Commodity, path: Tuple[NodeId, ...]) -> float:
    """Objective contribution of one commodity: arc weights in path order, then compute latency."""
    total = 0.0
    for key in zip(path[:-1], path[1:]):
        total += problem.latency_weight(commodity, problem.arc_map[key])
    return total + commodity.compute_latency(path[-1])


def route_delay(problem: ProblemInstance, commodity: Commodity, path: Tuple[NodeId, ...]) -> float:
    total = 0.0
    for key in zip(path[:-1], path[1:]):
        total += problem.delay_weight(commodity, problem.arc_map[key])
    return total + commodity.compute_latency(path[-1])


def routing_graph(problem: ProblemInstance,
                  commodity: Commodity,
                  loads: Optional[Mapping[ArcKey, float]] = None,
                  feeders: Optional[Mapping[NodeId, NodeId]] = None) -> nx.DiGraph:
    """
    Expanded digraph of one commodity.
    Arcs whose load plus the commodity's demand would exceed capacity are
    left out. `feeders` pins gateways to a single feeding satellite;
    gateways absent from it accept any satellite.
    """
    loads = loads or {}
    feeders = feeders or {}
    candidates = set(commodity.candidates)

    graph = nx.DiGraph()
    graph.add_nodes_from(problem.nodes)
    graph.add_node(SINK)
    for arc in problem.arcs:
        if not fits(arc, loads.get(arc.key, 0.0) + commodity.demand):
            continue
        latency = problem.latency_weight(commodity, arc)
        delay = problem.delay_weight(commodity, arc)
        if problem.is_gated(arc):
            if arc.head not in candidates:
                continue
            if feeders.get(arc.head, arc.tail) != arc.tail:
                continue
            graph.add_edge(arc.tail, feeder(arc.head), latency=latency, delay=delay)
        else:
            graph.add_edge(arc.tail, arc.head, latency=latency, delay=delay)

    for d in commodity.candidates:
        compute = commodity.compute_latency(d)
        graph.add_edge(d, SINK, latency=compute, delay=compute)
        if graph.has_node(feeder(d)):
            graph.add_edge(feeder(d), SINK, latency=compute, delay=compute)
    return graph


def decode(expanded: List[str]) -> Optional[Tuple[NodeId, ...]]:
    """Original-node path of an expanded path, or None when a node would repeat."""
    path = []
    for node in expanded:
        if node == SINK:
            break
        if node.endswith(FEEDER_SUFFIX):
            node = node[: -len(FEEDER_SUFFIX)]
        path.append(node)
    if len(set(path)) != len(path):
        return None
    return tuple(path)


def _make_route(problem: ProblemInstance, commodity: Commodity, expanded: List[str]) -> Optional[Route]:
    path = decode(expanded)
    if path is None or len(path) < 2:
        return None
    return Route(
        destination=path[-1],
        path=path,
        cost=route_cost(problem, commodity, path),
        delay=route_delay(problem, commodity, path),
    )


def shortest_feasible_route(problem: ProblemInstance, commodity: Commodity,
                            graph: nx.DiGraph) -> Optional[Route]:
    """
    Minimum-latency route whose packet delay stays within the commodity's
    bound. Label-setting over (latency, delay) with Pareto dominance; labels
    are popped in (latency, delay, path) order so ties resolve to the
    lexicographically smallest expanded path.
    """
    source = commodity.source
    if source not in graph:
        return None
    bound = commodity.delay_bound + TOL
    heap: List[Tuple[float, float, Tuple[str, ...]]] = [(0.0, 0.0, (source,))]
    settled: Dict[str, List[Tuple[float, float]]] = {}

    while heap:
        cost, delay, path = heapq.heappop(heap)
        node = path[-1]
        if node == SINK:
            route = _make_route(problem, commodity, list(path))
            if route is not None:
                return route
            continue
        labels = settled.setdefault(node, [])
        if any(c <= cost and d <= delay for c, d in labels):
            continue
        labels.append((cost, delay))
        visited = set(path)
        for head, attrs in graph[node].items():
            if head in visited:
                continue
            next_delay = delay + attrs["delay"]
            if next_delay > bound:
                continue
            heapq.heappush(heap, (cost + attrs["latency"], next_delay, path + (head,)))
    return None


def ranked_routes(problem: ProblemInstance, commodity: Commodity,
                  graph: nx.DiGraph, limit: Optional[int] = None) -> Iterator[Route]:
    """
    Simple routes in nondecreasing latency (Yen's algorithm via networkx).
    Delay feasibility is left to the caller.
    """
    if commodity.source not in graph or not commodity.candidates:
        return
    paths = nx.shortest_simple_paths(graph, commodity.source, SINK, weight="latency")
    try:
        for expanded in islice(paths, limit):
            route = _make_route(problem, commodity, expanded)
            if route is not None:
                yield route
    except nx.NetworkXNoPath:
        return


def lower_bound(problem: ProblemInstance, commodity: Commodity,
                feeders: Optional[Mapping[NodeId, NodeId]] = None) -> float:
    """Capacity-ignoring, delay-feasible minimum latency; inf when unroutable."""
    route = shortest_feasible_route(problem, commodity, routing_graph(problem, commodity, None, feeders))
    return math.inf if route is None else route.cost
