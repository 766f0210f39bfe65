"""
Run artifacts:

  metrics.csv         one row per run x snapshot x commodity class
                      (columns: run, use_case, mode, ratio, lambda, seed,
                      snapshot, time, status, class, solved, unsolved,
                      mean_latency, median_latency, p5_latency, p95_latency,
                      gateway_share, aircraft_share, bandwidth; latencies in
                      s, bandwidth in bit/s)
  summary.json        per-run metrics, improvements, monotonicity report
  latency_series.dat  whitespace-separated columns: snapshot, time, then the
                      mean commodity latency of each run ("nan" if unsolved)
  commodity_series.csv  per-flight / per-satellite latency over time: run,
                      commodity, snapshot, time, latency (empty if not
                      solved), reason (drop or infeasibility code,
                      "absent" when the commodity did not exist)

Wall times are logged but never written, so files depend only on the
scenario and seed.
"""

import json
import logging
import math
from pathlib import Path
from typing import Dict, Sequence, Union

import numpy as np
import pandas as pd

from .metrics import Metrics, result_records, snapshot_table
from .runner import RunResult

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.9g"

COMMODITY_SERIES_COLUMNS = ["run", "commodity", "snapshot", "time", "latency", "reason"]


def _clean(value):
    """JSON-safe copy: NaN and infinities become null."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def metrics_frame(results: Sequence[RunResult]) -> pd.DataFrame:
    frames = [snapshot_table(r) for r in results]
    frames = [f for f in frames if not f.empty]
    if not frames:
        return pd.DataFrame()
    return pd.concat(frames, ignore_index=True)


def write_metrics_csv(results: Sequence[RunResult], path: Union[str, Path]) -> Path:
    path = Path(path)
    metrics_frame(results).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_summary(summary: Dict[str, object], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_clean(summary), indent=2, sort_keys=True) + "\n")
    return path


def latency_series_frame(results: Sequence[RunResult]) -> pd.DataFrame:
    if not results:
        return pd.DataFrame(columns=["snapshot", "time"])
    base = results[0]
    frame = pd.DataFrame({
        "snapshot": [s.index for s in base.snapshots],
        "time": [s.time for s in base.snapshots],
    })
    for result in results:
        records = result_records(result)
        means = records.groupby("snapshot")["latency"].mean() if not records.empty else pd.Series(dtype=float)
        frame[result.label] = [means.get(s.index, np.nan) for s in base.snapshots]
    return frame


def write_latency_series(results: Sequence[RunResult], path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w") as handle:
        handle.write("# ")
        latency_series_frame(results).to_csv(handle, sep=" ", index=False, na_rep="nan",
                                             float_format=FLOAT_FORMAT)
    return path


def commodity_series_frame(results: Sequence[RunResult]) -> pd.DataFrame:
    """Long table of `RunResult.latency_series`: one row per run x commodity x snapshot."""
    rows = []
    for result in results:
        for commodity, series in result.latency_series().items():
            for s, latency in zip(result.snapshots, series):
                rows.append({
                    "run": result.label,
                    "commodity": commodity,
                    "snapshot": s.index,
                    "time": s.time,
                    "latency": np.nan if latency is None else latency,
                    "reason": s.unsolved.get(commodity, "" if commodity in s.classes else "absent"),
                })
    return pd.DataFrame(rows, columns=COMMODITY_SERIES_COLUMNS)


def write_commodity_series(results: Sequence[RunResult], path: Union[str, Path]) -> Path:
    path = Path(path)
    commodity_series_frame(results).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_run_outputs(out_dir: Union[str, Path], results: Sequence[RunResult],
                      metrics: Sequence[Metrics], extra: Dict[str, object] = None) -> Dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {
        "runs": [m.summary() for m in metrics],
        "partial": any(r.partial for r in results),
    }
    summary.update(extra or {})
    written = {
        "metrics": write_metrics_csv(results, out_dir / "metrics.csv"),
        "summary": write_summary(summary, out_dir / "summary.json"),
        "series": write_latency_series(results, out_dir / "latency_series.dat"),
        "commodity_series": write_commodity_series(results, out_dir / "commodity_series.csv"),
    }
    for name, path in written.items():
        logger.info("Wrote %s to %s", name, path)
    return written
