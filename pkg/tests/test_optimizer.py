import json

import numpy as np
import pytest

from factories import commodity, detour_problem, gateway_problem, make_problem, shared_link_problem

from aamecSim.network.demand import ComputeModel, TrafficModel
from aamecSim.network.nodes import NodeKind
from aamecSim.network.scenarios import desk_scenario
from aamecSim.network.topology import TopologyBuilder
from aamecSim.optimizer import (
    BudgetExceededError,
    InfeasibleError,
    MalformedInstanceError,
    ProblemInstance,
    Solution,
    SolveLimits,
    UseCase,
    build_airborne_problem,
    build_offload_problem,
    canonical_order,
    dump_instance,
    greedy_heuristic,
    load_instance,
    screen_commodities,
    solve_exact,
    validate_solution,
)


def test_shared_link_splits_flows():
    """One flow keeps the direct link, the other detours; ties break on (destination, path)."""
    problem = shared_link_problem()
    solution = solve_exact(problem)

    assert solution.optimal
    assert solution.assignment("AIR-000/a").path == ("AIR-000", "AIR-002")
    assert solution.assignment("AIR-000/b").path == ("AIR-000", "SAT-00-00", "AIR-002")
    assert validate_solution(problem, solution).feasible


def test_shared_link_objective_value():
    solution = solve_exact(shared_link_problem())
    c = 299_792_458.0
    direct = 30e6 / 45e6 + 2 * 300e3 / c
    detour = 2 * (30e6 / 60e6 + 2 * 1000e3 / c)
    assert np.isclose(solution.objective, direct + detour, rtol=1e-12)


def test_gateway_fed_by_one_satellite():
    problem = gateway_problem()
    solution = solve_exact(problem)

    assert solution.matching == (("GW-Rome", "SAT-00-00"),)
    assert solution.assignment("SAT-00-00/offload").path == ("SAT-00-00", "GW-Rome")
    assert solution.assignment("SAT-00-01/offload").path == ("SAT-00-01", "SAT-00-00", "GW-Rome")
    assert np.isclose(solution.assignment("SAT-00-01/offload").compute, 7.0304e-3)
    assert validate_solution(problem, solution).feasible


def test_delay_bound_changes_the_choice():
    loose = solve_exact(detour_problem(delay_bound=2.0))
    tight = solve_exact(detour_problem(delay_bound=0.1))

    assert loose.assignments[0].path == ("AIR-000", "AIR-002", "AIR-001")
    assert tight.assignments[0].path == ("AIR-000", "AIR-001")
    assert tight.objective > loose.objective


def test_infeasible_delay_bound_raises():
    with pytest.raises(InfeasibleError) as info:
        solve_exact(detour_problem(delay_bound=0.01))
    assert info.value.commodities == ("AIR-000/test",)


def test_screening_reasons():
    nodes = {"AIR-000": "aircraft", "AIR-001": "aircraft", "AIR-002": "aircraft"}
    flows = [
        commodity("AIR-000/ok", "AIR-000", ["AIR-001"]),
        commodity("AIR-000/slow", "AIR-000", ["AIR-001"], delay_bound=1e-6),
        commodity("AIR-002/none", "AIR-002", []),
    ]
    problem = make_problem(nodes, [("AIR-000", "AIR-001", 100e3, 45e6)], flows)
    kept, rejected = screen_commodities(problem)

    assert rejected == {"AIR-000/slow": "no_feasible_path", "AIR-002/none": "no_candidates"}
    assert [k.id for k in kept.commodities] == ["AIR-000/ok"]


def test_capacity_infeasible_without_detour():
    nodes = {"AIR-000": "aircraft", "AIR-001": "aircraft"}
    flows = [commodity(f"AIR-000/{n}", "AIR-000", ["AIR-001"], demand=30e6) for n in "ab"]
    problem = make_problem(nodes, [("AIR-000", "AIR-001", 100e3, 45e6)], flows)

    with pytest.raises(InfeasibleError):
        solve_exact(problem)
    with pytest.raises(InfeasibleError):
        greedy_heuristic(problem)


def test_empty_instance_is_trivially_optimal():
    problem = make_problem({"AIR-000": "aircraft"}, [], [], mec=[])
    solution = solve_exact(problem)
    assert solution.optimal
    assert solution.objective == 0.0
    assert solution.assignments == ()


def test_canonical_order():
    nodes = {"AIR-000": "aircraft", "AIR-001": "aircraft"}
    flows = [
        commodity("b", "AIR-000", ["AIR-001"], demand=1e6),
        commodity("a", "AIR-000", ["AIR-001"], demand=1e6),
        commodity("c", "AIR-000", ["AIR-001"], demand=5e6),
    ]
    problem = make_problem(nodes, [("AIR-000", "AIR-001", 100e3, 45e6)], flows)
    assert [k.id for k in canonical_order(problem)] == ["c", "a", "b"]


def test_greedy_never_beats_exact():
    problem = shared_link_problem()
    assert greedy_heuristic(problem).objective >= solve_exact(problem).objective - 1e-12


def test_budget_exhaustion_keeps_incumbent():
    problem = shared_link_problem()
    solution = solve_exact(problem, SolveLimits(node_budget=1, time_budget=60.0))

    assert not solution.optimal
    assert solution.gap is not None and solution.gap >= 0.0
    assert validate_solution(problem, solution).feasible

    with pytest.raises(BudgetExceededError) as info:
        solve_exact(problem, SolveLimits(node_budget=1, time_budget=60.0, require_optimal=True))
    assert info.value.incumbent is not None


def test_solve_limits_validation():
    with pytest.raises(ValueError):
        SolveLimits(node_budget=0)
    with pytest.raises(ValueError):
        SolveLimits(time_budget=-1.0)


def test_malformed_instances_rejected():
    nodes = {"AIR-000": "aircraft", "AIR-001": "aircraft"}
    with pytest.raises(MalformedInstanceError):
        make_problem(nodes, [("AIR-000", "AIR-001", 100e3, 0.0)], [])
    with pytest.raises(MalformedInstanceError):
        make_problem(nodes, [], [commodity("x", "AIR-000", ["AIR-001"])], mec=[])
    with pytest.raises(MalformedInstanceError):
        make_problem(nodes, [], [commodity("x", "AIR-000", ["AIR-000"])])


def test_instance_json_round_trip(tmp_path):
    problem = gateway_problem()
    path = tmp_path / "instance.json"
    dump_instance(problem, path)

    assert load_instance(path) == problem
    document = json.loads(path.read_text())
    weights = document["commodities"][0]["arc_weights"]["SAT-00-00>GW-Rome"]
    assert np.isclose(weights[0], 32e6 / 500e6 + 2e6 / 299_792_458.0)


def test_malformed_instance_document(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(MalformedInstanceError):
        load_instance(broken)

    with pytest.raises(MalformedInstanceError):
        ProblemInstance.from_dict({"format": 99})


def test_solution_round_trip():
    solution = solve_exact(gateway_problem())
    assert Solution.from_dict(json.loads(json.dumps(solution.to_dict()))) == solution


def test_desk_airborne_snapshot_solves():
    scenario = desk_scenario(seed=1, flight_count=3, horizon=600.0)
    snapshot = TopologyBuilder.build_snapshot(scenario, 0)
    aircraft = [scenario.nodes[n] for n in snapshot.ids_of(NodeKind.AIRCRAFT)]
    flows = TrafficModel.build_flows(aircraft, scenario.services, scenario.passenger_model)
    problem = build_airborne_problem(snapshot, flows)

    assert problem.use_case is UseCase.AIRBORNE
    for k in problem.commodities:
        assert k.source not in k.candidates
        assert set(snapshot.ids_of(NodeKind.GATEWAY)) <= set(k.candidates)

    kept, _ = screen_commodities(problem)
    solution = solve_exact(kept, SolveLimits(200_000, 60.0))
    report = validate_solution(kept, solution)
    assert report.feasible, report.describe()


def test_desk_offload_snapshot_solves():
    scenario = desk_scenario(seed=1, flight_count=3, horizon=600.0)
    snapshot = TopologyBuilder.build_snapshot(scenario, 0)
    loads = ComputeModel.build_task_loads(snapshot, 80.0, scenario.rng_seed)
    problem = build_offload_problem(snapshot, loads, task_model=scenario.task_model)

    offloading = [l for l in loads if l.offload > 0]
    assert len(problem.commodities) == len(offloading)
    for k in problem.commodities:
        assert k.delay_bound == 1.0
        assert k.demand == k.packet_size == 1.6e6 * k.tasks

    kept, _ = screen_commodities(problem)
    solution = solve_exact(kept, SolveLimits(200_000, 60.0))
    assert validate_solution(kept, solution).feasible
