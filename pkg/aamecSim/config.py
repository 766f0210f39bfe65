"""
YAML scenario files.

Quantities are bare SI numbers or strings with a unit ("781 km", "50 kbps",
"933 B", "60 ms"); see UnitManager for the accepted units. Unknown keys are
rejected at every level. Omitted sections fall back to the Iridium-Next
defaults (6 x 11 shell, ten gateways, four IFECS services, Cortex-A8
satellites and Cortex-A73 MEC servers).

    constellation: {planes, sats_per_plane, altitude, inclination,
                    raan_spacing, raan_origin, phase_offset, epoch}
    gateways:      [{name, country, latitude, longitude} | built-in name]
    flights:       [{name, origin: {latitude, longitude},
                     destination: {latitude, longitude},
                     departure, speed, cruise_altitude, passengers}]
    services:      [{name, bandwidth, delay, utilization, packet_size}]
    task_model:    {instructions, data_size, deadline}
    processors:    {satellite: {name, frequency, ipc, cores}, mec: {...}}
    passengers:    {usage_ratio}
    visibility:    {sat_ground_mask, air_ground_mask, air_air_range,
                    clearance_altitude}
    mec_aircraft_ratio, seed, horizon, snapshot_interval
    experiment:    {mec_ratios, lambda_grid}
    solver:        {node_budget, time_budget, require_optimal}
"""

import logging
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import yaml

from .maths.geom import FlightRoute, GeodeticPoint, OrbitShell
from .maths.units import UnitManager
from .network.demand import (CORTEX_A8, CORTEX_A73, DEFAULT_SERVICES, PassengerModel, ProcessorSpec, Service,
                             TaskModel, TrafficModel)
from .network.nodes import FlightSpec, GatewaySite
from .network.scenarios import DEFAULT_GATEWAYS, gateway, iridium_shell
from .network.topology import ExperimentSettings, Scenario, VisibilityThresholds

logger = logging.getLogger(__name__)

# Stream key of the passenger-count draws
PASSENGER_STREAM = 11

TOP_LEVEL_KEYS = (
    "constellation", "gateways", "flights", "services", "task_model", "processors", "passengers",
    "visibility", "mec_aircraft_ratio", "seed", "horizon", "snapshot_interval", "experiment", "solver",
)


class ScenarioConfigError(ValueError):
    """Invalid scenario file; names the offending key and, for syntax errors, the line."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        where = []
        if key:
            where.append(key)
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{' '.join(where)}: {message}" if where else message)


# =========================
# Field readers
# =========================

def _mapping(value: Any, key: str, allowed: Sequence[str]) -> Dict[str, Any]:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ScenarioConfigError("expected a mapping", key)
    unknown = sorted(set(value) - set(allowed))
    if unknown:
        raise ScenarioConfigError(f"unknown keys {unknown} (allowed: {', '.join(allowed)})", key)
    return value


def _list(value: Any, key: str) -> List[Any]:
    if not isinstance(value, list):
        raise ScenarioConfigError("expected a list", key)
    return value


def _quantity(section: Dict[str, Any], name: str, dimension: str, key: str, default=None) -> float:
    if name not in section:
        if default is None:
            raise ScenarioConfigError("missing required value", f"{key}.{name}")
        return float(default)
    try:
        return UnitManager.parse(section[name], dimension)
    except (TypeError, ValueError) as exc:
        raise ScenarioConfigError(str(exc), f"{key}.{name}") from exc


def _number(section: Dict[str, Any], name: str, key: str, default=None) -> float:
    value = section.get(name, default)
    if value is None:
        raise ScenarioConfigError("missing required value", f"{key}.{name}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioConfigError(f"expected a number, got {value!r}", f"{key}.{name}")
    return float(value)


def _integer(section: Dict[str, Any], name: str, key: str, default=None) -> int:
    value = section.get(name, default)
    if value is None:
        raise ScenarioConfigError("missing required value", f"{key}.{name}")
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioConfigError(f"expected an integer, got {value!r}", f"{key}.{name}")
    return value


def _wrap(key: str, build):
    try:
        return build()
    except ScenarioConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        raise ScenarioConfigError(str(message), key) from exc


# =========================
# Sections
# =========================

def _shell(data: Any) -> OrbitShell:
    if data is None:
        return iridium_shell()
    key = "constellation"
    s = _mapping(data, key, ("planes", "sats_per_plane", "altitude", "inclination", "raan_spacing",
                             "raan_origin", "phase_offset", "epoch"))
    planes = _integer(s, "planes", key)
    per_plane = _integer(s, "sats_per_plane", key)
    if planes <= 0 or per_plane <= 0:
        raise ScenarioConfigError("planes and sats_per_plane must be positive", key)
    return _wrap(key, lambda: OrbitShell(
        plane_count=planes,
        sats_per_plane=per_plane,
        altitude=_quantity(s, "altitude", "length", key),
        inclination=_quantity(s, "inclination", "angle", key),
        raan_spacing=_quantity(s, "raan_spacing", "angle", key, 180.0 / planes),
        phase_offset=_quantity(s, "phase_offset", "angle", key, 180.0 / per_plane),
        epoch=_quantity(s, "epoch", "time", key, 0.0),
        raan_origin=_quantity(s, "raan_origin", "angle", key, 0.0),
    ))


def _point(data: Any, key: str) -> GeodeticPoint:
    p = _mapping(data, key, ("latitude", "longitude", "altitude"))
    return _wrap(key, lambda: GeodeticPoint(
        _quantity(p, "latitude", "angle", key),
        _quantity(p, "longitude", "angle", key),
        _quantity(p, "altitude", "length", key, 0.0),
    ))


def _gateways(data: Any):
    if data is None:
        return DEFAULT_GATEWAYS
    sites = []
    for i, entry in enumerate(_list(data, "gateways")):
        key = f"gateways[{i}]"
        if isinstance(entry, str):
            sites.append(_wrap(key, lambda: gateway(entry)))
            continue
        g = _mapping(entry, key, ("name", "country", "latitude", "longitude", "altitude"))
        if not isinstance(g.get("name"), str):
            raise ScenarioConfigError("gateway needs a name", key)
        location = _point({k: g[k] for k in ("latitude", "longitude", "altitude") if k in g}, key)
        sites.append(GatewaySite(g["name"], location, str(g.get("country", ""))))
    return tuple(sites)


def _flights(data: Any, seed: int):
    if data is None:
        return ()
    flights = []
    for i, entry in enumerate(_list(data, "flights")):
        key = f"flights[{i}]"
        f = _mapping(entry, key, ("name", "origin", "destination", "departure", "speed",
                                  "cruise_altitude", "passengers"))
        name = f.get("name", f"Flight {i}")
        route = _wrap(key, lambda: FlightRoute(
            origin=_point(f.get("origin"), f"{key}.origin"),
            destination=_point(f.get("destination"), f"{key}.destination"),
            cruise_altitude=_quantity(f, "cruise_altitude", "length", key, 11_000.0),
            departure=_quantity(f, "departure", "time", key, 0.0),
            speed=_quantity(f, "speed", "speed", key, 250.0),
        ))
        if "passengers" in f:
            passengers = _integer(f, "passengers", key)
        else:
            passengers = TrafficModel.sample_passengers(np.random.default_rng([seed, PASSENGER_STREAM, i]))
            logger.debug("%s: sampled %d passengers", name, passengers)
        flights.append(_wrap(key, lambda: FlightSpec(str(name), route, passengers)))
    return tuple(flights)


def _services(data: Any):
    if data is None:
        return DEFAULT_SERVICES
    defaults = {s.name: s for s in DEFAULT_SERVICES}
    services = []
    for i, entry in enumerate(_list(data, "services")):
        key = f"services[{i}]"
        s = _mapping(entry, key, ("name", "bandwidth", "delay", "utilization", "packet_size"))
        if not isinstance(s.get("name"), str):
            raise ScenarioConfigError("service needs a name", key)
        base = defaults.get(s["name"])
        services.append(_wrap(key, lambda: Service(
            name=s["name"],
            bandwidth_per_user=_quantity(s, "bandwidth", "rate", key, base and base.bandwidth_per_user),
            delay_bound=_quantity(s, "delay", "time", key, base and base.delay_bound),
            utilization=_number(s, "utilization", key, base and base.utilization),
            packet_size=_quantity(s, "packet_size", "size", key, base and base.packet_size),
        )))
    return tuple(services)


def _task_model(data: Any) -> TaskModel:
    key = "task_model"
    t = _mapping(data, key, ("instructions", "data_size", "deadline"))
    base = TaskModel()
    return _wrap(key, lambda: TaskModel(
        instructions=_number(t, "instructions", key, base.instructions),
        data_size=_quantity(t, "data_size", "size", key, base.data_size),
        deadline=_quantity(t, "deadline", "time", key, base.deadline),
    ))


def _processor(data: Any, key: str, base: ProcessorSpec) -> ProcessorSpec:
    p = _mapping(data, key, ("name", "frequency", "ipc", "cores"))
    return _wrap(key, lambda: ProcessorSpec(
        name=str(p.get("name", base.name)),
        freq=_quantity(p, "frequency", "frequency", key, base.freq),
        ipc=_number(p, "ipc", key, base.ipc),
        cores=_integer(p, "cores", key, base.cores),
    ))


def _visibility(data: Any) -> VisibilityThresholds:
    key = "visibility"
    v = _mapping(data, key, ("sat_ground_mask", "air_ground_mask", "air_air_range", "clearance_altitude"))
    base = VisibilityThresholds()
    return _wrap(key, lambda: VisibilityThresholds(
        sat_ground_mask=_quantity(v, "sat_ground_mask", "angle", key, base.sat_ground_mask),
        air_ground_mask=_quantity(v, "air_ground_mask", "angle", key, base.air_ground_mask),
        air_air_range=_quantity(v, "air_air_range", "length", key, base.air_air_range),
        clearance_altitude=_quantity(v, "clearance_altitude", "length", key, base.clearance_altitude),
    ))


def _experiment(experiment: Any, solver: Any) -> ExperimentSettings:
    e = _mapping(experiment, "experiment", ("mec_ratios", "lambda_grid"))
    s = _mapping(solver, "solver", ("node_budget", "time_budget", "require_optimal"))
    base = ExperimentSettings()

    def floats(name: str, default):
        if name not in e:
            return default
        values = _list(e[name], f"experiment.{name}")
        if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in values):
            raise ScenarioConfigError("expected a list of numbers", f"experiment.{name}")
        return tuple(float(v) for v in values)

    require_optimal = s.get("require_optimal", base.require_optimal)
    if not isinstance(require_optimal, bool):
        raise ScenarioConfigError("expected true or false", "solver.require_optimal")
    return _wrap("experiment", lambda: ExperimentSettings(
        mec_ratios=floats("mec_ratios", base.mec_ratios),
        lambda_grid=floats("lambda_grid", base.lambda_grid),
        node_budget=_integer(s, "node_budget", "solver", base.node_budget),
        time_budget=_quantity(s, "time_budget", "time", "solver", base.time_budget),
        require_optimal=require_optimal,
    ))


# =========================
# Entry points
# =========================

def scenario_from_dict(data: Any, seed: Optional[int] = None) -> Scenario:
    """`seed`, when given, replaces the file's seed before any seeded draw."""
    data = _mapping(data, "scenario", TOP_LEVEL_KEYS)
    if seed is None:
        seed = _integer(data, "seed", "scenario", 1)
    ratio = _number(data, "mec_aircraft_ratio", "scenario", 0.2)
    if not 0.0 <= ratio <= 1.0:
        raise ScenarioConfigError(f"mec_aircraft_ratio out of [0,1]: {ratio:g}", "mec_aircraft_ratio")

    processors = _mapping(data.get("processors"), "processors", ("satellite", "mec"))
    scenario = _wrap("scenario", lambda: Scenario(
        shell=_shell(data.get("constellation")),
        gateways=_gateways(data.get("gateways")),
        flights=_flights(data.get("flights"), seed),
        mec_aircraft_ratio=ratio,
        rng_seed=seed,
    ))
    return _wrap("scenario", lambda: replace(
        scenario,
        services=_services(data.get("services")),
        horizon=_quantity(data, "horizon", "time", "scenario", scenario.horizon),
        snapshot_interval=_quantity(data, "snapshot_interval", "time", "scenario",
                                    scenario.snapshot_interval),
        visibility=_visibility(data.get("visibility")),
        passenger_model=PassengerModel(_number(
            _mapping(data.get("passengers"), "passengers", ("usage_ratio",)),
            "usage_ratio", "passengers", PassengerModel().usage_ratio)),
        task_model=_task_model(data.get("task_model")),
        satellite_processor=_processor(processors.get("satellite"), "processors.satellite", CORTEX_A8),
        mec_processor=_processor(processors.get("mec"), "processors.mec", CORTEX_A73),
        experiment=_experiment(data.get("experiment"), data.get("solver")),
    ))


def parse_scenario(path: Union[str, Path], seed: Optional[int] = None) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioConfigError(f"cannot read scenario file {path} ({exc.strerror})") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or str(exc)
        raise ScenarioConfigError(f"YAML syntax error in {path}: {problem}",
                                  line=None if mark is None else mark.line + 1) from exc
    scenario = scenario_from_dict(data if data is not None else {}, seed)
    logger.info("Loaded scenario %s: %d satellites, %d gateways, %d flights", path,
                scenario.shell.total_satellites, len(scenario.gateways), len(scenario.flights))
    return scenario


def emit_scenario(scenario: Scenario) -> Dict[str, Any]:
    """Fully resolved document; every quantity carries its SI unit."""
    q = UnitManager.emit
    shell = scenario.shell

    def point(p: GeodeticPoint) -> Dict[str, str]:
        return {"latitude": q(p.latitude, "angle"), "longitude": q(p.longitude, "angle"),
                "altitude": q(p.altitude, "length")}

    def processor(p: ProcessorSpec) -> Dict[str, Any]:
        return {"name": p.name, "frequency": q(p.freq, "frequency"), "ipc": p.ipc, "cores": p.cores}

    return {
        "seed": scenario.rng_seed,
        "mec_aircraft_ratio": scenario.mec_aircraft_ratio,
        "horizon": q(scenario.horizon, "time"),
        "snapshot_interval": q(scenario.snapshot_interval, "time"),
        "constellation": {
            "planes": shell.plane_count, "sats_per_plane": shell.sats_per_plane,
            "altitude": q(shell.altitude, "length"), "inclination": q(shell.inclination, "angle"),
            "raan_spacing": q(shell.raan_spacing, "angle"), "raan_origin": q(shell.raan_origin, "angle"),
            "phase_offset": q(shell.phase_offset, "angle"), "epoch": q(shell.epoch, "time"),
        },
        "gateways": [dict(name=g.name, country=g.country, **point(g.location)) for g in scenario.gateways],
        "flights": [
            {
                "name": f.name, "origin": point(f.route.origin), "destination": point(f.route.destination),
                "departure": q(f.route.departure, "time"), "speed": q(f.route.speed, "speed"),
                "cruise_altitude": q(f.route.cruise_altitude, "length"), "passengers": f.passengers,
            }
            for f in scenario.flights
        ],
        "services": [
            {"name": s.name, "bandwidth": q(s.bandwidth_per_user, "rate"), "delay": q(s.delay_bound, "time"),
             "utilization": s.utilization, "packet_size": q(s.packet_size, "size")}
            for s in scenario.services
        ],
        "task_model": {
            "instructions": scenario.task_model.instructions,
            "data_size": q(scenario.task_model.data_size, "size"),
            "deadline": q(scenario.task_model.deadline, "time"),
        },
        "processors": {"satellite": processor(scenario.satellite_processor),
                       "mec": processor(scenario.mec_processor)},
        "passengers": {"usage_ratio": scenario.passenger_model.usage_ratio},
        "visibility": {
            "sat_ground_mask": q(scenario.visibility.sat_ground_mask, "angle"),
            "air_ground_mask": q(scenario.visibility.air_ground_mask, "angle"),
            "air_air_range": q(scenario.visibility.air_air_range, "length"),
            "clearance_altitude": q(scenario.visibility.clearance_altitude, "length"),
        },
        "experiment": {"mec_ratios": list(scenario.experiment.mec_ratios),
                       "lambda_grid": list(scenario.experiment.lambda_grid)},
        "solver": {"node_budget": scenario.experiment.node_budget,
                   "time_budget": q(scenario.experiment.time_budget, "time"),
                   "require_optimal": scenario.experiment.require_optimal},
    }


def dump_scenario(scenario: Scenario) -> str:
    return yaml.safe_dump(emit_scenario(scenario), sort_keys=False, allow_unicode=True)


def write_resolved(scenario: Scenario, out_dir: Union[str, Path]) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "scenario.resolved.yaml"
    path.write_text(dump_scenario(scenario))
    return path
