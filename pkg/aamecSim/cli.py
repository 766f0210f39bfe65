"""
Command-line entry point `aamec-sim`.

    aamec-sim airborne  [--scenario PATH] [--mode dynamic|static|both] [--ratios 0,0.2,0.4] ...
    aamec-sim offload   [... same ...] [--lambdas 72,76,80]
    aamec-sim validate  --instance PATH --solution PATH
    aamec-sim guide     [--references]

Exit codes: 0 success, 1 usage/configuration/malformed input,
2 infeasible or budget-exceeded snapshots (partial results written),
3 constraint violation found by `validate`.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .config import ScenarioConfigError, parse_scenario, write_resolved
from .experiments.metrics import aggregate_metrics, compare_runs, monotonicity_report
from .experiments.report import write_run_outputs
from .experiments.runner import Mode, RunResult, dump_snapshot, sweep_mec_ratio
from .guide import LibraryGuide
from .network.scenarios import desk_scenario
from .network.topology import Scenario, TopologyBuilder, export_snapshot
from .optimizer.errors import MalformedInstanceError
from .optimizer.problem import UseCase, load_instance
from .optimizer.search import SolveLimits, load_solution
from .optimizer.validator import validate_solution

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 2
EXIT_VIOLATION = 3

OUTPUT_ENV = "AAMEC_OUTPUT_DIR"
DEFAULT_OUTPUT = "aamec-output"


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _add_run_arguments(parser: argparse.ArgumentParser, offload: bool):
    parser.add_argument("--scenario", type=str, default=None,
                        help="YAML scenario file (default: built-in desk scenario)")
    parser.add_argument("--mode", choices=["dynamic", "static", "both"], default="both",
                        help="Destination policy to run (default: both)")
    parser.add_argument("--ratios", type=_float_list, default=None,
                        help="Comma-separated MEC aircraft ratios (default: scenario value)")
    if offload:
        parser.add_argument("--lambdas", type=_float_list, default=None,
                            help="Comma-separated task arrival rates (default: scenario grid)")
    parser.add_argument("--out", type=str, default=None,
                        help=f"Output directory (default: ${OUTPUT_ENV} or ./{DEFAULT_OUTPUT})")
    parser.add_argument("--seed", type=int, default=None, help="Overrides the scenario seed")
    parser.add_argument("--node-budget", type=int, default=None, help="Branch-and-bound node budget")
    parser.add_argument("--time-budget", type=float, default=None, help="Per-snapshot time budget (s)")
    parser.add_argument("--require-optimal", action="store_true",
                        help="Treat budget exhaustion as failure of the snapshot")
    parser.add_argument("--jobs", type=int, default=1,
                        help="Worker processes for dynamic runs (static runs solve snapshots in order)")
    parser.add_argument("--dump-instances", action="store_true",
                        help="Write every solved instance and solution as JSON")
    parser.add_argument("--plots", action="store_true", help="Write PNG figures")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aamec-sim", description="Aerial-aided MEC simulator and exact optimizer")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings only")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    _add_run_arguments(sub.add_parser("airborne", help="Airborne IFECS flow placement"), offload=False)
    _add_run_arguments(sub.add_parser("offload", help="Satellite task offloading"), offload=True)

    validate = sub.add_parser("validate", help="Check a dumped solution against its instance")
    validate.add_argument("--instance", required=True, type=str)
    validate.add_argument("--solution", required=True, type=str)

    guide = sub.add_parser("guide", help="Print the model guide")
    guide.add_argument("--references", action="store_true", help="Also print background references")
    return parser


# =========================
# Subcommands
# =========================

def _load_scenario(args) -> Scenario:
    if args.scenario is None:
        return desk_scenario(seed=1 if args.seed is None else args.seed)
    return parse_scenario(args.scenario, seed=args.seed)


def _limits(args, scenario: Scenario) -> SolveLimits:
    base = SolveLimits.from_settings(scenario.experiment)
    return SolveLimits(
        node_budget=base.node_budget if args.node_budget is None else args.node_budget,
        time_budget=base.time_budget if args.time_budget is None else args.time_budget,
        require_optimal=base.require_optimal or args.require_optimal,
    )


def _write_plots(out_dir: Path, scenario: Scenario, runs: Sequence[RunResult], sweeps: Dict[str, list]):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from .visualization.visualizer import Visualizer

    figures = {
        "latency_series.png": Visualizer.plot_latency_series(runs),
        "topology_r000.png": Visualizer.plot_snapshot(TopologyBuilder.build_snapshot(scenario, 0)),
    }
    for result in runs:
        figures[f"commodity_series_{result.label}.png"] = Visualizer.plot_commodity_series(result)
    for name, sweep in sweeps.items():
        if len(sweep) > 1:
            figures[f"utilization_{name}.png"] = Visualizer.plot_utilization(sweep)
        for ratio, _, metrics in sweep:
            figures[f"class_latency_{name}_ratio{ratio:g}.png"] = Visualizer.plot_class_latency(metrics)
    for filename, fig in figures.items():
        fig.savefig(out_dir / filename, dpi=120, bbox_inches="tight")
        plt.close(fig)
    logger.info("Wrote %d figures to %s", len(figures), out_dir)


def cmd_run(args) -> int:
    use_case = UseCase(args.command)
    try:
        scenario = _load_scenario(args)
        limits = _limits(args, scenario)
        if args.jobs < 1:
            raise ValueError("--jobs must be at least 1")
    except (ScenarioConfigError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_ERROR

    out_dir = Path(args.out or os.environ.get(OUTPUT_ENV, DEFAULT_OUTPUT))
    ratios = args.ratios if args.ratios else [scenario.mec_aircraft_ratio]
    lambdas: List[Optional[float]] = [None]
    if use_case is UseCase.OFFLOAD:
        lambdas = list(args.lambdas if args.lambdas else scenario.experiment.lambda_grid)
    modes = [Mode.DYNAMIC, Mode.STATIC] if args.mode == "both" else [Mode(args.mode)]

    runs: List[RunResult] = []
    metrics = []
    sweeps: Dict[str, list] = {}
    comparisons: Dict[str, object] = {}
    try:
        for lam in lambdas:
            suffix = "" if lam is None else f"-lambda{lam:g}"
            by_mode = {}
            for mode in modes:
                sweep = sweep_mec_ratio(scenario, ratios, use_case, mode, lam, limits, args.jobs)
                by_mode[mode] = sweep
                sweeps[f"{mode.value}{suffix}"] = sweep
                if len(sweep) > 1:
                    comparisons[f"monotonicity-{mode.value}{suffix}"] = monotonicity_report(sweep)
                    base = sweep[0][1]
                    comparisons[f"ratio-vs-{sweep[0][0]:g}-{mode.value}{suffix}"] = {
                        f"{ratio:g}": compare_runs(base, result) for ratio, result, _ in sweep[1:]
                    }
            for position, ratio in enumerate(ratios):
                for mode in modes:
                    result = by_mode[mode][position][1]
                    baseline = None
                    if mode is Mode.DYNAMIC and Mode.STATIC in by_mode:
                        baseline = by_mode[Mode.STATIC][position][1]
                    runs.append(result)
                    metrics.append(aggregate_metrics(result, baseline=baseline))
                    if baseline is not None:
                        comparisons[f"static-vs-dynamic-ratio{ratio:g}{suffix}"] = metrics[-1].improvement
    except ValueError as exc:
        logger.error("%s", exc)
        return EXIT_ERROR

    write_resolved(scenario, out_dir)
    write_run_outputs(out_dir, runs, metrics, {"comparisons": comparisons, "seed": scenario.rng_seed})
    if args.dump_instances:
        topology_dir = out_dir / "topology"
        topology_dir.mkdir(parents=True, exist_ok=True)
        for snapshot in TopologyBuilder.snapshot_series(scenario):
            (topology_dir / f"r{snapshot.index:03d}.json").write_text(export_snapshot(snapshot) + "\n")
        for result in runs:
            for snapshot in result.snapshots:
                dump_snapshot(snapshot, out_dir / "instances")
    if args.plots:
        _write_plots(out_dir, scenario, runs, sweeps)

    if any(r.partial for r in runs):
        logger.warning("Some snapshots were infeasible or exhausted the solver budget; results are partial.")
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        problem = load_instance(args.instance)
        solution = load_solution(args.solution)
        report = validate_solution(problem, solution)
    except OSError as exc:
        logger.error("cannot read %s (%s)", exc.filename, exc.strerror)
        return EXIT_ERROR
    except MalformedInstanceError as exc:
        logger.error("%s", exc)
        return EXIT_ERROR
    print(report.describe())
    if not report.feasible:
        logger.error("Violated constraints: %s", ", ".join(report.failed))
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_guide(args) -> int:
    LibraryGuide.help()
    if args.references:
        LibraryGuide.references()
    return EXIT_OK


COMMANDS = {"airborne": cmd_run, "offload": cmd_run, "validate": cmd_validate, "guide": cmd_guide}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(message)s", force=True)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
