import numpy as np
import pytest
from scipy import stats

from aamecSim.maths.geom import FlightRoute, GeodeticPoint
from aamecSim.network.demand import (
    CORTEX_A8,
    CORTEX_A73,
    DEFAULT_SERVICES,
    ComputeModel,
    LatencyModel,
    PassengerModel,
    ProcessorSpec,
    TaskModel,
    TrafficModel,
)
from aamecSim.network.nodes import MAX_PASSENGERS, MIN_PASSENGERS, AircraftNode, FlightSpec
from aamecSim.network.scenarios import desk_scenario
from aamecSim.network.topology import TopologyBuilder

SERVICES = {s.name: s for s in DEFAULT_SERVICES}


def _aircraft(index, passengers):
    route = FlightRoute(GeodeticPoint(10.0, 10.0), GeodeticPoint(20.0, 20.0))
    return AircraftNode(index, FlightSpec(f"F{index}", route, passengers))


def test_service_table():
    """Web 100 kbps/500 ms/0.14/933 B ... Video 1.5 Mbps/300 ms/0.67/1378 B"""
    web, gaming = SERVICES["Web Service"], SERVICES["Online Gaming"]
    voip, video = SERVICES["VoIP"], SERVICES["Video Streaming"]

    assert (web.bandwidth_per_user, web.delay_bound, web.utilization, web.packet_size) == (100e3, 0.5, 0.14, 7464)
    assert (gaming.bandwidth_per_user, gaming.delay_bound, gaming.utilization, gaming.packet_size) == (50e3, 0.06, 0.04, 192)
    assert (voip.bandwidth_per_user, voip.delay_bound, voip.utilization, voip.packet_size) == (64e3, 0.1, 0.15, 6632)
    assert (video.bandwidth_per_user, video.delay_bound, video.utilization, video.packet_size) == (1.5e6, 0.3, 0.67, 11024)


def test_flow_demand_examples():
    """
    D = B_m * U_m * N_a * rho_a
    """
    assert np.isclose(TrafficModel.flow_demand(180, 0.2, SERVICES["Web Service"]), 504e3)
    assert TrafficModel.flow_demand(0, 0.2, SERVICES["VoIP"]) == 0.0
    assert np.isclose(TrafficModel.flow_demand(853, 0.2, SERVICES["Video Streaming"]), 171.453e6)


def test_flow_demand_is_linear_in_passengers():
    service = SERVICES["VoIP"]
    one = TrafficModel.flow_demand(100, 0.2, service)
    assert np.isclose(TrafficModel.flow_demand(300, 0.2, service), 3 * one)


def test_build_flows_cardinality_and_fields():
    aircraft = [_aircraft(i, 180) for i in range(10)]
    flows = TrafficModel.build_flows(aircraft, DEFAULT_SERVICES, PassengerModel())
    assert len(flows) == 40

    gaming = [f for f in flows if f.service.name == "Online Gaming"]
    assert all(f.delay_bound == 0.060 and f.packet_size == 192 for f in gaming)
    assert gaming[0].id == "AIR-000/Online Gaming"
    assert len({f.demand for f in gaming}) == 1


def test_processor_capacities():
    """
    C = Freq * IPC * n_cores
    Cortex-A8: 2000 MIPS, 80 tasks/s; Cortex-A73: 71120 MIPS, 2844 tasks/s
    """
    task_model = TaskModel()
    assert ComputeModel.processor_capacity(CORTEX_A8, task_model) == (2000.0, 80)
    assert ComputeModel.processor_capacity(CORTEX_A73, task_model) == (71120.0, 2844)

    doubled = ProcessorSpec("fast A8", 2.0e9, 2.0, 1)
    assert doubled.mips == 2 * CORTEX_A8.mips


def test_processor_rejects_bad_values():
    with pytest.raises(ValueError):
        ProcessorSpec("broken", 0.0, 1.0, 1)
    with pytest.raises(ValueError):
        ProcessorSpec("broken", 1e9, 1.0, 0)


def test_poisson_zero_rate():
    rng = np.random.default_rng(0)
    assert all(ComputeModel.sample_task_arrivals(0.0, rng) == 0 for _ in range(100))
    with pytest.raises(ValueError):
        ComputeModel.sample_task_arrivals(-1.0, rng)


@pytest.mark.parametrize("lam", [72.0, 76.0, 80.0])
def test_poisson_goodness_of_fit(lam):
    """
    J_s ~ Poisson(lambda): moments and a chi-squared test over binned counts
    """
    rng = np.random.default_rng(20240101)
    n = 100_000
    draws = np.array([ComputeModel.sample_task_arrivals(lam, rng) for _ in range(n)])

    assert lam - 0.5 <= draws.mean() <= lam + 0.5
    assert lam - 4.0 <= draws.var() <= lam + 4.0

    # bins: (-inf, lo], lo+1, ..., hi-1, [hi, inf)
    lo, hi = int(lam - 3 * np.sqrt(lam)), int(lam + 3 * np.sqrt(lam))
    edges = np.arange(lo, hi + 1)
    observed = np.array(
        [np.sum(draws <= lo)] + [np.sum(draws == k) for k in edges[1:-1]] + [np.sum(draws >= hi)]
    )
    expected_p = np.concatenate((
        [stats.poisson.cdf(lo, lam)],
        stats.poisson.pmf(edges[1:-1], lam),
        [stats.poisson.sf(hi - 1, lam)],
    ))
    expected = expected_p * n
    assert np.isclose(expected.sum(), n)

    _, p_value = stats.chisquare(observed, expected)
    assert p_value > 0.01


def test_task_rng_is_keyed():
    a = ComputeModel.task_rng(1, 5, 3).poisson(80, size=5)
    b = ComputeModel.task_rng(1, 5, 3).poisson(80, size=5)
    c = ComputeModel.task_rng(1, 6, 3).poisson(80, size=5)

    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_offload_load_examples():
    """
    O_s = max(J_s - C_s, 0), O^B = D_T * O_s / tau_s
    """
    task_model = TaskModel()
    assert ComputeModel.offload_load(100, 80, task_model) == (20, 32e6)
    assert ComputeModel.offload_load(80, 80, task_model) == (0, 0.0)
    assert ComputeModel.offload_load(50, 80, task_model) == (0, 0.0)


def test_mec_compute_latency_examples():
    """
    L^MEC = I * O_s / C^MEC
    """
    task_model = TaskModel()
    assert ComputeModel.mec_compute_latency(0, CORTEX_A73, task_model) == 0.0
    assert np.isclose(ComputeModel.mec_compute_latency(20, CORTEX_A73, task_model), 7.0304e-3, atol=1e-6)
    assert np.isclose(ComputeModel.mec_compute_latency(2844, CORTEX_A73, task_model), 0.999719, atol=1e-5)


def test_transmission_latencies():
    """
    L' = D / B, L'^p = P / B
    """
    assert np.isclose(LatencyModel.transmission_latency(504e3, 45e6), 0.0112)
    assert np.isclose(LatencyModel.transmission_latency(192, 75e6), 2.56e-6)
    assert LatencyModel.transmission_latency(45e6, 45e6) == 1.0

    with pytest.raises(ValueError):
        LatencyModel.transmission_latency(1.0, 0.0)


def test_flow_latency_dominates_packet_latency():
    flow, packet = LatencyModel.link_total_latency(504e3, 7464, 1e6, 112e6)
    assert flow >= packet

    report = LatencyModel.analyze(504e3, 7464, 1e6, 112e6)
    assert np.isclose(report["Flow Latency (s)"], flow)
    assert np.isclose(report["Propagation (s)"] * 2 + report["Packet Transmission (s)"], packet)


def test_sampled_passengers_in_range():
    rng = np.random.default_rng(5)
    counts = [TrafficModel.sample_passengers(rng) for _ in range(2000)]
    assert min(counts) >= MIN_PASSENGERS
    assert max(counts) <= MAX_PASSENGERS


def test_build_task_loads_is_order_independent():
    scenario = desk_scenario(seed=3, horizon=600.0, flight_count=2)
    snapshot = TopologyBuilder.build_snapshot(scenario, 1)

    loads = ComputeModel.build_task_loads(snapshot, 80.0, scenario.rng_seed)
    again = ComputeModel.build_task_loads(snapshot, 80.0, scenario.rng_seed)
    assert loads == again
    assert len(loads) == scenario.shell.total_satellites
    for load in loads:
        assert load.capacity == 80
        assert load.offload == max(load.arrivals - 80, 0)
        assert load.offload_bandwidth == 1.6e6 * load.offload
