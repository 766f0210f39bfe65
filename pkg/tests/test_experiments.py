import json
import math
from types import SimpleNamespace

import numpy as np
import pandas as pd
import pytest

from factories import commodity, make_problem

from aamecSim.experiments import (
    Mode,
    aggregate_metrics,
    commodity_series_frame,
    compare_runs,
    dominance_violations,
    improvement,
    metrics_frame,
    monotonicity_report,
    run_dynamic,
    run_static,
    snapshot_table,
    sweep_mec_ratio,
    write_run_outputs,
)
from aamecSim.experiments import runner
from aamecSim.experiments.runner import REASON_UNREACHABLE, STATUS_INFEASIBLE, STATUS_OPTIMAL
from aamecSim.maths.constants import PhysicalConstants
from aamecSim.network.scenarios import desk_scenario
from aamecSim.optimizer import SolveLimits, UseCase, validate_solution

LIMITS = SolveLimits(200_000, 60.0)


@pytest.fixture(scope="module")
def scenario():
    return desk_scenario(seed=1, flight_count=3, horizon=600.0, mec_aircraft_ratio=0.67)


@pytest.fixture(scope="module")
def airborne_runs(scenario):
    return (run_dynamic(scenario, UseCase.AIRBORNE, limits=LIMITS),
            run_static(scenario, UseCase.AIRBORNE, limits=LIMITS))


def test_improvement_formula():
    """(base - new) / base in percent"""
    assert np.isclose(improvement(10e-3, 9e-3), 10.0)
    assert improvement(0.0, 0.0) == 0.0
    assert improvement(5.0, 6.0) == -20.0


def test_commodities_are_conserved(airborne_runs):
    for run in airborne_runs:
        for s in run.snapshots:
            assert s.solved + len(s.dropped) + len(s.infeasible) == s.total


def test_every_solution_validates(airborne_runs):
    for run in airborne_runs:
        for s in run.snapshots:
            if s.solution is not None:
                assert validate_solution(s.problem, s.solution).feasible


def test_dynamic_never_worse_than_static(airborne_runs):
    dynamic, static = airborne_runs
    assert dominance_violations(static, dynamic) == []


def test_static_keeps_destinations(airborne_runs):
    _, static = airborne_runs
    first = {}
    for s in static.snapshots:
        if s.solution is None:
            continue
        for a in s.solution.assignments:
            assert first.setdefault(a.commodity_id, a.destination) == a.destination
        for cid, reason in s.unsolved.items():
            if reason == REASON_UNREACHABLE:
                assert cid in first


def test_run_labels_and_statuses(airborne_runs):
    dynamic, static = airborne_runs
    assert dynamic.mode is Mode.DYNAMIC and static.mode is Mode.STATIC
    assert dynamic.label == "airborne-dynamic-ratio0.67"
    assert dynamic.lam is None
    assert len(dynamic.snapshots) == 3
    for s in dynamic.snapshots:
        assert s.status in (STATUS_OPTIMAL, "budget_exceeded", STATUS_INFEASIBLE)


def test_metrics_shares_and_stats(airborne_runs):
    dynamic, static = airborne_runs
    metrics = aggregate_metrics(dynamic, baseline=static)

    if metrics.solved:
        assert math.isclose(sum(metrics.destination_shares.values()), 1.0)
        assert math.isclose(sum(metrics.location_shares.values()), 1.0)
        assert set(metrics.destination_shares) == {"aircraft", "gateway"}
        stats = metrics.latency
        assert (stats["p5"] <= stats["median"]).all()
        assert (stats["median"] <= stats["p95"]).all()
    assert metrics.improvement["snapshots"] <= len(dynamic.snapshots)
    assert metrics.summary()["commodities"] == sum(s.total for s in dynamic.snapshots)


def test_compare_run_with_itself(airborne_runs):
    dynamic, _ = airborne_runs
    result = compare_runs(dynamic, dynamic)
    assert result["mean_latency"] == 0.0
    assert result["objective"] == 0.0


def test_ratio_sweep_is_monotone(scenario):
    sweep = sweep_mec_ratio(scenario, [0.0, 0.34, 0.67, 1.0], UseCase.AIRBORNE, limits=LIMITS)
    assert [ratio for ratio, _, _ in sweep] == [0.0, 0.34, 0.67, 1.0]

    report = monotonicity_report(sweep)
    assert report["monotone"], report
    assert len(report["steps"]) == 3


def test_sweep_rejects_bad_ratio(scenario):
    with pytest.raises(ValueError):
        sweep_mec_ratio(scenario, [0.0, 1.5], UseCase.AIRBORNE, limits=LIMITS)


def test_offload_run(scenario):
    run = run_dynamic(scenario, UseCase.OFFLOAD, lam=80.0, limits=LIMITS)
    assert run.lam == 80.0
    assert run.label.endswith("-lambda80")
    for s in run.snapshots:
        assert all(cid.endswith("/offload") for cid in s.classes)
        assert set(s.classes.values()) <= {"lambda=80"}
        assert s.solved + len(s.infeasible) == s.total


def test_offload_defaults_to_largest_lambda(scenario):
    run = run_static(scenario, UseCase.OFFLOAD, limits=LIMITS)
    assert run.lam == 80.0


def test_zero_rate_has_no_offloading(scenario):
    run = run_dynamic(scenario, UseCase.OFFLOAD, lam=0.0, limits=LIMITS)
    assert all(s.total == 0 and s.status == STATUS_OPTIMAL for s in run.snapshots)


def test_runs_are_deterministic(scenario, airborne_runs):
    dynamic, _ = airborne_runs
    again = run_dynamic(scenario, UseCase.AIRBORNE, limits=LIMITS)
    parallel = run_dynamic(scenario, UseCase.AIRBORNE, limits=LIMITS, jobs=2)

    assert again.snapshots == dynamic.snapshots
    assert parallel.objectives == dynamic.objectives
    pd.testing.assert_frame_equal(snapshot_table(parallel), snapshot_table(dynamic))


def test_snapshot_table_columns(airborne_runs):
    table = metrics_frame(list(airborne_runs))
    assert list(table.columns) == [
        "run", "use_case", "mode", "ratio", "lambda", "seed", "snapshot", "time", "status", "class",
        "solved", "unsolved", "mean_latency", "median_latency", "p5_latency", "p95_latency",
        "gateway_share", "aircraft_share", "bandwidth",
    ]
    assert set(table["mode"]) == {"dynamic", "static"}


def test_write_run_outputs(tmp_path, airborne_runs):
    runs = list(airborne_runs)
    metrics = [aggregate_metrics(r) for r in runs]
    written = write_run_outputs(tmp_path, runs, metrics, {"seed": 1})

    assert sorted(p.name for p in written.values()) == [
        "commodity_series.csv", "latency_series.dat", "metrics.csv", "summary.json"]
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["seed"] == 1
    assert len(summary["runs"]) == 2

    lines = (tmp_path / "latency_series.dat").read_text().splitlines()
    assert lines[0].startswith("# snapshot time")
    assert len(lines) == 1 + 3
    assert np.loadtxt(tmp_path / "latency_series.dat").shape == (3, 2 + len(runs))
    assert pd.read_csv(tmp_path / "metrics.csv").shape[0] == metrics_frame(runs).shape[0]


# Two hand-built snapshots: AIR-000's nearest MEC aircraft AIR-001 loses its
# only link in the second one, AIR-002 stays reachable throughout.
GAMING = "AIR-000/Online Gaming"
NEAR, FAR = 100e3, 300e3


def _fixture_problem(index):
    nodes = {"AIR-000": "aircraft", "AIR-001": "aircraft", "AIR-002": "aircraft"}
    links = [("AIR-000", "AIR-002", FAR, 45e6)]
    if index == 0:
        links.append(("AIR-000", "AIR-001", NEAR, 45e6))
    flow = commodity(GAMING, "AIR-000", ["AIR-001", "AIR-002"], demand=1e6, packet_size=192,
                     delay_bound=0.06, label="Online Gaming")
    return make_problem(nodes, links, [flow], instance_id=f"fixture-r{index}")


@pytest.fixture
def lost_destination(monkeypatch, scenario):
    snapshots = [SimpleNamespace(index=i, time=300.0 * i) for i in range(2)]
    monkeypatch.setattr(runner.TopologyBuilder, "snapshot_series", staticmethod(lambda _: snapshots))
    monkeypatch.setattr(runner, "build_problem", lambda _s, snapshot, *args: _fixture_problem(snapshot.index))
    return scenario


def test_static_drops_unreachable_destination(lost_destination):
    static = run_static(lost_destination, UseCase.AIRBORNE, limits=LIMITS)
    dynamic = run_dynamic(lost_destination, UseCase.AIRBORNE, limits=LIMITS)

    first, second = static.snapshots
    assert first.solution.destination_of(GAMING) == "AIR-001"
    assert second.dropped == {GAMING: REASON_UNREACHABLE}
    assert second.solved == 0 and second.total == 1
    assert second.status == STATUS_OPTIMAL

    assert dynamic.snapshots[1].solution.destination_of(GAMING) == "AIR-002"
    assert aggregate_metrics(static).drops == {REASON_UNREACHABLE: 1}


def test_commodity_latency_series(lost_destination):
    """L = D / B + 2 d / c on the single hop to the chosen aircraft"""
    static = run_static(lost_destination, UseCase.AIRBORNE, limits=LIMITS)
    dynamic = run_dynamic(lost_destination, UseCase.AIRBORNE, limits=LIMITS)
    near = 1e6 / 45e6 + 2 * NEAR / PhysicalConstants.c
    far = 1e6 / 45e6 + 2 * FAR / PhysicalConstants.c

    series = static.latency_series()
    assert list(series) == [GAMING]
    assert len(series[GAMING]) == len(static.snapshots)
    assert np.isclose(series[GAMING][0], near)
    assert series[GAMING][1] is None
    assert np.allclose(dynamic.latency_series()[GAMING], [near, far])

    frame = commodity_series_frame([static, dynamic])
    assert list(frame.columns) == ["run", "commodity", "snapshot", "time", "latency", "reason"]
    assert len(frame) == 4
    dropped = frame[frame["latency"].isna()]
    assert dropped["reason"].tolist() == [REASON_UNREACHABLE]
    assert dropped["run"].tolist() == [static.label]


def test_commodity_series_marks_absent_commodities(airborne_runs):
    dynamic, _ = airborne_runs
    series = dynamic.latency_series()
    frame = commodity_series_frame([dynamic])

    assert set(series) == {cid for s in dynamic.snapshots for cid in s.classes}
    assert len(frame) == len(series) * len(dynamic.snapshots)
    absent = frame[frame["reason"] == "absent"]
    assert absent["latency"].isna().all()
