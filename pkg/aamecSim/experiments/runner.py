"""
Static and dynamic runs over a scenario's snapshot series, and MEC-ratio
sweeps.

Dynamic: destinations and paths are re-optimized at every snapshot.
Static: a commodity's destination is fixed by the first snapshot that solves
it; later snapshots re-optimize paths only, and a commodity whose fixed
destination is gone or unreachable within its delay bound is dropped with
reason "unreachable".
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..network.demand import ComputeModel, TrafficModel
from ..network.nodes import NodeKind
from ..network.topology import Scenario, Snapshot, TopologyBuilder
from ..optimizer.errors import BudgetExceededError, InfeasibleError
from ..optimizer.problem import (ProblemInstance, UseCase, build_airborne_problem, build_offload_problem,
                                 dump_instance)
from ..optimizer.search import Solution, SolveLimits, dump_solution, screen_commodities, solve_exact

logger = logging.getLogger(__name__)

STATUS_OPTIMAL = "optimal"
STATUS_BUDGET = "budget_exceeded"
STATUS_INFEASIBLE = "infeasible"

REASON_UNREACHABLE = "unreachable"
REASON_NO_PATH = "no_feasible_path"
REASON_NO_CANDIDATES = "no_candidates"
REASON_INFEASIBLE = "infeasible"
REASON_BUDGET = "budget"


class Mode(str, Enum):
    DYNAMIC = "dynamic"
    STATIC = "static"


@dataclass(frozen=True)
class SnapshotResult:
    index: int
    time: float
    problem: ProblemInstance            # instance handed to the solver
    solution: Optional[Solution]
    unsolved: Dict[str, str]            # commodity id -> reason
    classes: Dict[str, str]             # commodity id -> class label, every commodity of the snapshot
    status: str
    wall_time: float = field(default=0.0, compare=False)

    @property
    def total(self) -> int:
        return len(self.classes)

    @property
    def solved(self) -> int:
        return 0 if self.solution is None else len(self.solution.assignments)

    @property
    def dropped(self) -> Dict[str, str]:
        return {cid: r for cid, r in self.unsolved.items() if r == REASON_UNREACHABLE}

    @property
    def infeasible(self) -> Dict[str, str]:
        return {cid: r for cid, r in self.unsolved.items() if r != REASON_UNREACHABLE}

    @property
    def objective(self) -> Optional[float]:
        return None if self.solution is None else self.solution.objective

    @property
    def solved_ids(self) -> frozenset:
        return frozenset() if self.solution is None else frozenset(self.solution.destinations)


@dataclass(frozen=True)
class RunResult:
    use_case: UseCase
    mode: Mode
    ratio: float
    lam: Optional[float]
    seed: int
    snapshots: Tuple[SnapshotResult, ...]

    @property
    def label(self) -> str:
        text = f"{self.use_case.value}-{self.mode.value}-ratio{self.ratio:g}"
        return text if self.lam is None else f"{text}-lambda{self.lam:g}"

    @property
    def partial(self) -> bool:
        return any(s.status != STATUS_OPTIMAL for s in self.snapshots)

    @property
    def objectives(self) -> List[Optional[float]]:
        return [s.objective for s in self.snapshots]

    def latency_series(self) -> Dict[str, List[Optional[float]]]:
        """Per-commodity latency per snapshot; None where dropped, infeasible or absent."""
        ids = sorted({cid for s in self.snapshots for cid in s.classes})
        series = {cid: [None] * len(self.snapshots) for cid in ids}
        for position, s in enumerate(self.snapshots):
            if s.solution is None:
                continue
            for a in s.solution.assignments:
                series[a.commodity_id][position] = a.latency
        return series


# =========================
# Per-snapshot work
# =========================

def build_problem(scenario: Scenario, snapshot: Snapshot, use_case: UseCase,
                  lam: Optional[float] = None, tag: str = "") -> ProblemInstance:
    if use_case is UseCase.AIRBORNE:
        aircraft = [scenario.nodes[n] for n in snapshot.ids_of(NodeKind.AIRCRAFT)]
        flows = TrafficModel.build_flows(aircraft, scenario.services, scenario.passenger_model)
        return build_airborne_problem(snapshot, flows, tag=tag)
    if lam is None:
        raise ValueError("Offload runs need a task arrival rate.")
    loads = ComputeModel.build_task_loads(snapshot, lam, scenario.rng_seed,
                                          scenario.satellite_processor, scenario.task_model)
    processors = {NodeKind.AIRCRAFT: scenario.mec_processor, NodeKind.GATEWAY: scenario.mec_processor}
    return build_offload_problem(snapshot, loads, task_model=scenario.task_model,
                                 processors=processors, tag=tag)


def solve_snapshot(problem: ProblemInstance, limits: SolveLimits,
                   unsolved: Optional[Dict[str, str]] = None
                   ) -> Tuple[ProblemInstance, Optional[Solution], Dict[str, str], str, float]:
    """Screen, solve and classify one instance; never raises solver errors."""
    started = time.perf_counter()
    unsolved = dict(unsolved or {})
    routable, rejected = screen_commodities(problem)
    for cid, reason in rejected.items():
        unsolved.setdefault(cid, reason)

    solution: Optional[Solution] = None
    status = STATUS_OPTIMAL
    try:
        solution = solve_exact(routable, limits)
        if not solution.optimal:
            status = STATUS_BUDGET
    except InfeasibleError as exc:
        status = STATUS_INFEASIBLE
        for k in routable.commodities:
            unsolved.setdefault(k.id, REASON_INFEASIBLE)
        logger.warning("%s: %s", problem.instance_id, exc)
    except BudgetExceededError as exc:
        status = STATUS_BUDGET
        solution = exc.incumbent
        if solution is None:
            for k in routable.commodities:
                unsolved.setdefault(k.id, REASON_BUDGET)
        logger.warning("%s: %s", problem.instance_id, exc)
    return routable, solution, unsolved, status, time.perf_counter() - started


def _solve_job(job: Tuple[ProblemInstance, SolveLimits]):
    return solve_snapshot(*job)


def _record(snapshot: Snapshot, full: ProblemInstance, outcome) -> SnapshotResult:
    problem, solution, unsolved, status, wall = outcome
    if solution is not None:
        logger.info("Snapshot %d (%s): %s, %d/%d commodities, objective %.6g s", snapshot.index,
                    full.instance_id, status, len(solution.assignments), len(full.commodities),
                    solution.objective)
    else:
        logger.info("Snapshot %d (%s): %s", snapshot.index, full.instance_id, status)
    return SnapshotResult(snapshot.index, snapshot.time, problem, solution, unsolved,
                          {k.id: k.label for k in full.commodities}, status, wall)


def _tag(mode: Mode, scenario: Scenario, lam: Optional[float]) -> str:
    tag = f"{mode.value}-m{scenario.mec_aircraft_ratio:g}"
    return tag if lam is None else f"{tag}-l{lam:g}"


def _default_lambda(scenario: Scenario, use_case: UseCase, lam: Optional[float]) -> Optional[float]:
    if use_case is UseCase.AIRBORNE:
        return None
    if lam is not None:
        return lam
    return max(scenario.experiment.lambda_grid)


def dump_snapshot(result: SnapshotResult, directory: Union[str, Path]):
    """Instance and solution files for the `validate` subcommand."""
    if result.solution is None:
        return
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    dump_instance(result.problem, directory / f"{result.problem.instance_id}.instance.json")
    dump_solution(result.solution, directory / f"{result.problem.instance_id}.solution.json")


# =========================
# Runs
# =========================

def run_dynamic(scenario: Scenario, use_case: UseCase, lam: Optional[float] = None,
                limits: Optional[SolveLimits] = None, jobs: int = 1) -> RunResult:
    """Every snapshot optimized independently; `jobs` > 1 solves snapshots in worker processes."""
    lam = _default_lambda(scenario, use_case, lam)
    limits = limits or SolveLimits.from_settings(scenario.experiment)
    snapshots = TopologyBuilder.snapshot_series(scenario)
    tag = _tag(Mode.DYNAMIC, scenario, lam)
    problems = [build_problem(scenario, s, use_case, lam, tag) for s in snapshots]
    logger.info("Dynamic %s run: %d snapshots, ratio %g", use_case.value, len(snapshots),
                scenario.mec_aircraft_ratio)

    if jobs > 1 and len(problems) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_solve_job, [(p, limits) for p in problems]))
    else:
        outcomes = [solve_snapshot(p, limits) for p in problems]

    results = tuple(_record(s, p, o) for s, p, o in zip(snapshots, problems, outcomes))
    return RunResult(use_case, Mode.DYNAMIC, scenario.mec_aircraft_ratio, lam, scenario.rng_seed, results)


def run_static(scenario: Scenario, use_case: UseCase, lam: Optional[float] = None,
               limits: Optional[SolveLimits] = None) -> RunResult:
    """
    Destinations fixed at a commodity's first solved snapshot: snapshot 0 for
    everything solved there, later ones for flights that appear mid-run.
    Snapshots are solved in order, so there is no `jobs` argument.
    """
    lam = _default_lambda(scenario, use_case, lam)
    limits = limits or SolveLimits.from_settings(scenario.experiment)
    snapshots = TopologyBuilder.snapshot_series(scenario)
    tag = _tag(Mode.STATIC, scenario, lam)
    logger.info("Static %s run: %d snapshots, ratio %g", use_case.value, len(snapshots),
                scenario.mec_aircraft_ratio)

    fixed: Dict[str, str] = {}
    results = []
    for snapshot in snapshots:
        full = build_problem(scenario, snapshot, use_case, lam, tag)
        overrides = {
            k.id: ((fixed[k.id],) if fixed[k.id] in k.candidates else ())
            for k in full.commodities if k.id in fixed
        }
        restricted = full.with_candidates(overrides)
        _, rejected = screen_commodities(restricted)
        unreachable = {cid: REASON_UNREACHABLE for cid in rejected if cid in fixed}
        if unreachable:
            logger.warning("Snapshot %d: %d commodities lost their fixed destination",
                           snapshot.index, len(unreachable))
        outcome = solve_snapshot(restricted, limits, unreachable)
        solution = outcome[1]
        if solution is not None:
            for a in solution.assignments:
                fixed.setdefault(a.commodity_id, a.destination)
        results.append(_record(snapshot, full, outcome))
    return RunResult(use_case, Mode.STATIC, scenario.mec_aircraft_ratio, lam, scenario.rng_seed, tuple(results))


def run_mode(scenario: Scenario, use_case: UseCase, mode: Mode, lam: Optional[float] = None,
             limits: Optional[SolveLimits] = None, jobs: int = 1) -> RunResult:
    if mode is Mode.DYNAMIC:
        return run_dynamic(scenario, use_case, lam, limits, jobs)
    if jobs > 1:
        logger.info("Static runs solve snapshots sequentially; jobs=%d ignored", jobs)
    return run_static(scenario, use_case, lam, limits)


def sweep_mec_ratio(scenario: Scenario, ratios: Sequence[float], use_case: UseCase,
                    mode: Mode = Mode.DYNAMIC, lam: Optional[float] = None,
                    limits: Optional[SolveLimits] = None, jobs: int = 1):
    """
    One run per ratio, same seed; aircraft MEC sets are prefixes of one
    permutation and therefore nested for increasing ratios.
    Returns a list of (ratio, RunResult, Metrics).
    """
    from .metrics import aggregate_metrics

    for ratio in ratios:
        if not 0.0 <= ratio <= 1.0:
            raise ValueError(f"mec_aircraft_ratio out of [0,1]: {ratio}")
    sweep = []
    for ratio in ratios:
        result = run_mode(replace(scenario, mec_aircraft_ratio=ratio), use_case, mode, lam, limits, jobs)
        sweep.append((ratio, result, aggregate_metrics(result)))
    return sweep
