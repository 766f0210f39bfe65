"""Per-snapshot latency-minimization instances, exact and exhaustive solvers, and an independent validator."""

from .errors import BudgetExceededError, InfeasibleError, MalformedInstanceError, OptimizerError, TooLargeError
from .oracle import MAX_ENUMERATION, commodity_options, solve_oracle
from .problem import (Arc, Commodity, ProblemInstance, UseCase, build_airborne_problem, build_offload_problem,
                      dump_instance, load_instance)
from .routing import Route, lower_bound, ranked_routes, routing_graph, shortest_feasible_route
from .search import (BranchAndBound, CommodityAssignment, Solution, SolveLimits, canonical_order, dump_solution,
                     greedy_heuristic, latency_breakdown, load_solution, make_solution, screen_commodities,
                     solve_exact)
from .validator import ConstraintCheck, ValidationReport, arc_loads, total_bandwidth, validate_solution
