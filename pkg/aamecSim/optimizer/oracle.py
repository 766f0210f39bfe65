"""
Exhaustive ground truth for small instances: every destination, every
simple path and every gateway matching implied by them.
"""

import itertools
import math
from typing import Dict, List, Tuple

import networkx as nx

from ..network.nodes import NodeId
from .errors import InfeasibleError, TooLargeError
from .problem import Commodity, ProblemInstance
from .routing import TOL, fits, route_delay
from .search import Solution, assignment_key, assignment_objective, is_better, make_solution

MAX_ENUMERATION = 1_000_000

Option = Tuple[Tuple[NodeId, ...], Tuple[Tuple[NodeId, NodeId], ...], Dict[NodeId, NodeId]]


def _admissible(problem: ProblemInstance, commodity: Commodity, path: Tuple[NodeId, ...]) -> bool:
    for position, key in enumerate(zip(path[:-1], path[1:])):
        arc = problem.arc_map[key]
        if not fits(arc, commodity.demand):
            return False
        if problem.is_gated(arc) and (position != len(path) - 2 or arc.head != path[-1]):
            return False
    return route_delay(problem, commodity, path) <= commodity.delay_bound + TOL


def commodity_options(problem: ProblemInstance, commodity: Commodity) -> List[Option]:
    """(path, arcs, feeders) for each admissible simple path to each candidate."""
    graph = nx.DiGraph()
    graph.add_nodes_from(problem.nodes)
    graph.add_edges_from(a.key for a in problem.arcs)
    options = []
    for d in commodity.candidates:
        for path in nx.all_simple_paths(graph, commodity.source, d):
            path = tuple(path)
            if not _admissible(problem, commodity, path):
                continue
            arcs = tuple(zip(path[:-1], path[1:]))
            last = problem.arc_map[arcs[-1]]
            feeders = {last.head: last.tail} if problem.is_gated(last) else {}
            options.append((path, arcs, feeders))
    return options


def solve_oracle(problem: ProblemInstance) -> Solution:
    if not problem.commodities:
        return make_solution(problem, {}, optimal=True, gap=0.0)

    commodities = sorted(problem.commodities, key=lambda k: k.id)
    options = [commodity_options(problem, k) for k in commodities]
    empty = [k.id for k, opts in zip(commodities, options) if not opts]
    if empty:
        raise InfeasibleError(f"{len(empty)} commodities have no admissible route.", empty)
    size = math.prod(len(opts) for opts in options)
    if size > MAX_ENUMERATION:
        raise TooLargeError(f"{size} combinations exceed the enumeration bound of {MAX_ENUMERATION}.")

    best_objective, best_key, best_paths = math.inf, None, None
    for combo in itertools.product(*options):
        loads: Dict[Tuple[NodeId, NodeId], float] = {}
        for k, (_, arcs, _) in zip(commodities, combo):
            for key in arcs:
                loads[key] = loads.get(key, 0.0) + k.demand
        if not all(fits(problem.arc_map[key], load) for key, load in loads.items()):
            continue
        matching: Dict[NodeId, NodeId] = {}
        consistent = True
        for _, _, feeders in combo:
            for g, s in feeders.items():
                if matching.setdefault(g, s) != s:
                    consistent = False
        if not consistent:
            continue
        paths = {k.id: path for k, (path, _, _) in zip(commodities, combo)}
        objective = assignment_objective(problem, paths)
        key = assignment_key(paths)
        if is_better(objective, key, best_objective, best_key):
            best_objective, best_key, best_paths = objective, key, paths

    if best_paths is None:
        raise InfeasibleError(f"{problem.instance_id}: no assignment satisfies all constraints.",
                              [k.id for k in commodities])
    return make_solution(problem, best_paths, optimal=True, gap=0.0, nodes_explored=size)


