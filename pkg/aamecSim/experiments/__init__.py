"""
Experiments Module
==================

Contains:
- Static and dynamic runs over a snapshot series
- MEC deployment-ratio sweeps
- Metrics aggregation and run comparisons
- CSV / JSON / plot-data reports
"""

from .runner import (
    Mode,
    RunResult,
    SnapshotResult,
    build_problem,
    solve_snapshot,
    dump_snapshot,
    run_dynamic,
    run_static,
    run_mode,
    sweep_mec_ratio,
)
from .metrics import (
    Metrics,
    aggregate_metrics,
    compare_runs,
    comparable_snapshots,
    dominance_violations,
    improvement,
    monotonicity_report,
    result_records,
    snapshot_table,
)
from .report import (
    commodity_series_frame,
    metrics_frame,
    write_commodity_series,
    write_latency_series,
    write_metrics_csv,
    write_run_outputs,
    write_summary,
)

__all__ = [
    "Mode",
    "RunResult",
    "SnapshotResult",
    "build_problem",
    "solve_snapshot",
    "dump_snapshot",
    "run_dynamic",
    "run_static",
    "run_mode",
    "sweep_mec_ratio",
    "Metrics",
    "aggregate_metrics",
    "compare_runs",
    "comparable_snapshots",
    "dominance_violations",
    "improvement",
    "monotonicity_report",
    "result_records",
    "snapshot_table",
    "metrics_frame",
    "write_metrics_csv",
    "write_summary",
    "write_latency_series",
    "commodity_series_frame",
    "write_commodity_series",
    "write_run_outputs",
]
