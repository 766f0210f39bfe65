"""
Run metrics: latency statistics per commodity class, MEC utilization shares,
consumed bandwidth and relative improvements between runs.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..network.nodes import NodeKind
from ..optimizer.validator import total_bandwidth
from .runner import STATUS_OPTIMAL, RunResult, SnapshotResult

OBJECTIVE_TOL = 1e-9

RECORD_COLUMNS = [
    "snapshot", "time", "commodity", "source", "class", "destination", "destination_class",
    "latency", "propagation", "transmission", "compute", "hops", "demand", "bandwidth",
]
STAT_COLUMNS = ["count", "mean", "median", "p5", "p95"]
DESTINATION_CLASSES = (NodeKind.GATEWAY.value, NodeKind.AIRCRAFT.value)


@dataclass
class Metrics:
    label: str
    records: pd.DataFrame
    latency: pd.DataFrame                       # index: class, columns: STAT_COLUMNS
    destination_shares: Dict[str, float]        # gateway / aircraft
    location_shares: Dict[str, float]           # per destination node
    bandwidth: pd.Series                        # bit/s per snapshot
    drops: Dict[str, int]                       # reason -> count
    total_commodities: int = 0
    improvement: Optional[Dict[str, float]] = field(default=None)

    @property
    def solved(self) -> int:
        return len(self.records)

    @property
    def mean_latency(self) -> float:
        return float(self.records["latency"].mean()) if len(self.records) else math.nan

    @property
    def median_latency(self) -> float:
        return float(self.records["latency"].median()) if len(self.records) else math.nan

    def summary(self) -> Dict[str, object]:
        return {
            "label": self.label,
            "commodities": self.total_commodities,
            "solved": self.solved,
            "mean_latency": self.mean_latency,
            "median_latency": self.median_latency,
            "destination_shares": self.destination_shares,
            "location_shares": self.location_shares,
            "total_bandwidth": float(self.bandwidth.sum()),
            "drops": self.drops,
            "improvement": self.improvement,
        }


def improvement(base: float, new: float) -> float:
    """(base - new) / base, in percent."""
    if base == 0:
        return 0.0 if new == 0 else -math.inf
    return (base - new) / base * 100.0


def snapshot_records(snapshot: SnapshotResult) -> List[dict]:
    if snapshot.solution is None:
        return []
    problem = snapshot.problem
    rows = []
    for a in snapshot.solution.assignments:
        k = problem.commodity_map[a.commodity_id]
        rows.append({
            "snapshot": snapshot.index,
            "time": snapshot.time,
            "commodity": k.id,
            "source": k.source,
            "class": k.label,
            "destination": a.destination,
            "destination_class": problem.kind_of[a.destination].value,
            "latency": a.latency,
            "propagation": a.propagation,
            "transmission": a.transmission,
            "compute": a.compute,
            "hops": a.hops,
            "demand": k.demand,
            "bandwidth": k.demand * a.hops,
        })
    return rows


def result_records(result: RunResult) -> pd.DataFrame:
    rows = [row for s in result.snapshots for row in snapshot_records(s)]
    return pd.DataFrame(rows, columns=RECORD_COLUMNS)


def latency_stats(records: pd.DataFrame, by: str = "class") -> pd.DataFrame:
    if records.empty:
        return pd.DataFrame(columns=STAT_COLUMNS)
    grouped = records.groupby(by)["latency"]
    return pd.DataFrame({
        "count": grouped.count(),
        "mean": grouped.mean(),
        "median": grouped.median(),
        "p5": grouped.quantile(0.05),
        "p95": grouped.quantile(0.95),
    })[STAT_COLUMNS]


def _shares(counts: pd.Series, keys: Sequence[str] = ()) -> Dict[str, float]:
    total = int(counts.sum())
    shares = {key: 0.0 for key in keys}
    for key, count in counts.items():
        shares[str(key)] = float(count) / total if total else 0.0
    return dict(sorted(shares.items()))


def comparable_snapshots(base: RunResult, new: RunResult) -> List[Tuple[SnapshotResult, SnapshotResult]]:
    """Snapshot pairs solved to optimality on identical commodity sets."""
    pairs = []
    for a, b in zip(base.snapshots, new.snapshots):
        if a.index != b.index or a.solution is None or b.solution is None:
            continue
        if a.status != STATUS_OPTIMAL or b.status != STATUS_OPTIMAL:
            continue
        if a.solved_ids != b.solved_ids:
            continue
        pairs.append((a, b))
    return pairs


def compare_runs(base: RunResult, new: RunResult) -> Dict[str, float]:
    """Improvement of `new` over `base` on their comparable snapshots."""
    pairs = comparable_snapshots(base, new)
    base_rows = pd.DataFrame([r for a, _ in pairs for r in snapshot_records(a)], columns=RECORD_COLUMNS)
    new_rows = pd.DataFrame([r for _, b in pairs for r in snapshot_records(b)], columns=RECORD_COLUMNS)
    if base_rows.empty:
        return {"snapshots": len(pairs), "mean_latency": 0.0, "median_latency": 0.0,
                "objective": 0.0, "bandwidth": 0.0}
    return {
        "snapshots": len(pairs),
        "mean_latency": improvement(base_rows["latency"].mean(), new_rows["latency"].mean()),
        "median_latency": improvement(base_rows["latency"].median(), new_rows["latency"].median()),
        "objective": improvement(math.fsum(a.objective for a, _ in pairs),
                                 math.fsum(b.objective for _, b in pairs)),
        "bandwidth": improvement(base_rows["bandwidth"].sum(), new_rows["bandwidth"].sum()),
    }


def dominance_violations(upper: RunResult, lower: RunResult) -> List[int]:
    """Snapshots where `lower`'s objective exceeds `upper`'s (both optimal, same commodities)."""
    return [a.index for a, b in comparable_snapshots(upper, lower)
            if b.objective > a.objective + OBJECTIVE_TOL]


def monotonicity_report(sweep: Sequence[Tuple[float, RunResult, "Metrics"]]) -> Dict[str, object]:
    """Per consecutive ratio pair, snapshots whose objective increased with the larger MEC set."""
    ordered = sorted(sweep, key=lambda item: item[0])
    steps = []
    for (r1, run1, _), (r2, run2, _) in zip(ordered, ordered[1:]):
        pairs = comparable_snapshots(run1, run2)
        steps.append({
            "from": r1,
            "to": r2,
            "compared": len(pairs),
            "violations": dominance_violations(run1, run2),
        })
    return {"monotone": all(not s["violations"] for s in steps), "steps": steps}


def aggregate_metrics(result: RunResult, baseline: Optional[RunResult] = None,
                      label: Optional[str] = None) -> Metrics:
    """Fold one run into metrics; with a baseline, improvements of `result` over it are attached."""
    records = result_records(result)
    drops: Dict[str, int] = {}
    for s in result.snapshots:
        for reason in s.unsolved.values():
            drops[reason] = drops.get(reason, 0) + 1

    index = [s.index for s in result.snapshots]
    bandwidth = pd.Series(
        [total_bandwidth(s.problem, s.solution) if s.solution is not None else 0.0 for s in result.snapshots],
        index=pd.Index(index, name="snapshot"), dtype=float,
    )
    return Metrics(
        label=label or result.label,
        records=records,
        latency=latency_stats(records),
        destination_shares=_shares(records["destination_class"].value_counts(), DESTINATION_CLASSES),
        location_shares=_shares(records["destination"].value_counts()),
        bandwidth=bandwidth,
        drops=dict(sorted(drops.items())),
        total_commodities=sum(s.total for s in result.snapshots),
        improvement=None if baseline is None else compare_runs(baseline, result),
    )


def snapshot_table(result: RunResult) -> pd.DataFrame:
    """One row per snapshot x commodity class."""
    records = result_records(result)
    rows = []
    for s in result.snapshots:
        rows_s = records[records["snapshot"] == s.index]
        classes = sorted(set(s.classes.values()))
        for cls in classes:
            subset = rows_s[rows_s["class"] == cls]
            latency = subset["latency"].to_numpy(dtype=float)
            shares = _shares(subset["destination_class"].value_counts(), DESTINATION_CLASSES)
            rows.append({
                "run": result.label,
                "use_case": result.use_case.value,
                "mode": result.mode.value,
                "ratio": result.ratio,
                "lambda": result.lam if result.lam is not None else np.nan,
                "seed": result.seed,
                "snapshot": s.index,
                "time": s.time,
                "status": s.status,
                "class": cls,
                "solved": len(subset),
                "unsolved": sum(1 for c in s.unsolved if s.classes.get(c) == cls),
                "mean_latency": latency.mean() if latency.size else np.nan,
                "median_latency": np.median(latency) if latency.size else np.nan,
                "p5_latency": np.percentile(latency, 5) if latency.size else np.nan,
                "p95_latency": np.percentile(latency, 95) if latency.size else np.nan,
                "gateway_share": shares[NodeKind.GATEWAY.value],
                "aircraft_share": shares[NodeKind.AIRCRAFT.value],
                "bandwidth": float(subset["bandwidth"].sum()),
            })
    return pd.DataFrame(rows)
