from dataclasses import replace

import numpy as np
import pytest

from factories import gateway_problem, shared_link_problem

from aamecSim.optimizer import (
    MalformedInstanceError,
    arc_loads,
    make_solution,
    solve_exact,
    total_bandwidth,
    validate_solution,
)


def test_optimal_solution_passes_every_check():
    problem = gateway_problem()
    report = validate_solution(problem, solve_exact(problem))

    assert report.feasible
    assert report.failed == []
    assert "feasible" in report.describe()


def test_overloaded_arc_is_reported():
    problem = shared_link_problem()
    direct = ("AIR-000", "AIR-002")
    solution = make_solution(problem, {"AIR-000/a": direct, "AIR-000/b": direct}, optimal=False)
    report = validate_solution(problem, solution)

    assert not report.feasible
    assert report.failed == ["bandwidth"]
    assert report.check("bandwidth").violations[0].startswith("arc AIR-000->AIR-002")


def test_missing_edge_is_reported():
    problem = shared_link_problem()
    solution = solve_exact(problem)
    bogus = replace(solution.assignments[0], path=("AIR-000", "AIR-009", "AIR-002"))
    broken = replace(solution, assignments=(bogus,) + solution.assignments[1:])
    report = validate_solution(problem, broken)

    assert "flow_conservation" in report.failed
    assert any("edge AIR-000->AIR-009 absent from snapshot" in v
               for v in report.check("flow_conservation").violations)


def test_gateway_fed_twice_is_reported():
    problem = gateway_problem()
    paths = {
        "SAT-00-00/offload": ("SAT-00-00", "GW-Rome"),
        "SAT-00-01/offload": ("SAT-00-01", "GW-Rome"),
    }
    report = validate_solution(problem, make_solution(problem, paths, optimal=False))

    assert report.failed == ["gateway_matching"]


def test_gated_arc_must_be_last_hop():
    problem = gateway_problem()
    solution = solve_exact(problem)
    detour = replace(solution.assignment("SAT-00-00/offload"),
                     path=("SAT-00-00", "GW-Rome", "SAT-00-01"), destination="SAT-00-01")
    broken = replace(solution, assignments=(detour,) + solution.assignments[1:])
    report = validate_solution(problem, broken)

    assert "gateway_gating" in report.failed
    assert "single_destination" in report.failed


def test_missing_commodity_and_wrong_objective():
    problem = shared_link_problem()
    solution = solve_exact(problem)

    partial = replace(solution, assignments=solution.assignments[:1])
    assert "single_destination" in validate_solution(problem, partial).failed

    skewed = replace(solution, objective=solution.objective + 1e-3)
    assert validate_solution(problem, skewed).failed == ["objective"]


def test_instance_mismatch_raises():
    solution = replace(solve_exact(shared_link_problem()), instance_id="other")
    with pytest.raises(MalformedInstanceError):
        validate_solution(shared_link_problem(), solution)


def test_arc_loads_and_bandwidth():
    problem = shared_link_problem()
    solution = solve_exact(problem)
    loads = arc_loads(problem, solution)

    assert loads == {
        ("AIR-000", "AIR-002"): 30e6,
        ("AIR-000", "SAT-00-00"): 30e6,
        ("SAT-00-00", "AIR-002"): 30e6,
    }
    assert np.isclose(total_bandwidth(problem, solution), 90e6)
