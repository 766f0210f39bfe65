# -*- coding: utf-8 -*-

"""
AAMECSIM v1.0
Aerial-aided multi-access edge computing: snapshot network simulator
and exact per-snapshot latency optimizer.
License: MIT
"""

__version__ = "1.0.0"
__authors__ = ["AAMECSim developers"]

# Geometry and units
from .maths.constants import PhysicalConstants
from .maths.units import UnitManager
from .maths.geom import EarthGeometry, GeodeticPoint, OrbitShell, FlightRoute

# Network model
from .network.nodes import NodeKind
from .network.classifier import LinkType, LinkClassifier
from .network.topology import Scenario, Snapshot, TopologyBuilder
from .network.demand import TrafficModel, ComputeModel, LatencyModel
from .network.scenarios import desk_scenario, iridium_shell

# Optimizer
from .optimizer.problem import UseCase, ProblemInstance, build_airborne_problem, build_offload_problem
from .optimizer.search import Solution, SolveLimits, solve_exact, greedy_heuristic
from .optimizer.oracle import solve_oracle
from .optimizer.validator import validate_solution

# Experiments
from .experiments.runner import Mode, run_dynamic, run_static, sweep_mec_ratio
from .experiments.metrics import aggregate_metrics, compare_runs

# Configuration
from .config import parse_scenario, scenario_from_dict, ScenarioConfigError

# Visualization
from .visualization.visualizer import Visualizer

# Guide
from .guide import LibraryGuide
