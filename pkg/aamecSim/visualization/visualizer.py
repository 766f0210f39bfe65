import logging
from typing import Optional, Sequence, Tuple

import matplotlib.pyplot as plt
import numpy as np

from ..experiments.metrics import Metrics, result_records
from ..experiments.runner import RunResult
from ..maths.geom import EarthGeometry
from ..network.nodes import NodeKind
from ..network.topology import Snapshot

logger = logging.getLogger(__name__)

KIND_STYLE = {
    NodeKind.SATELLITE: dict(color="tab:blue", marker="^", s=30),
    NodeKind.AIRCRAFT: dict(color="tab:orange", marker="o", s=25),
    NodeKind.GATEWAY: dict(color="tab:green", marker="s", s=40),
}


def _axes(ax: Optional[plt.Axes], figsize: Tuple[float, float]):
    if ax is None:
        fig, ax = plt.subplots(figsize=figsize)
        return fig, ax
    return ax.figure, ax


class Visualizer:
    @staticmethod
    def plot_latency_series(results: Sequence[RunResult], ax: Optional[plt.Axes] = None):
        """Mean commodity latency per snapshot, one line per run."""
        fig, ax = _axes(ax, (8, 4))
        for result in results:
            records = result_records(result)
            if records.empty:
                continue
            means = records.groupby("snapshot")["latency"].mean()
            times = {s.index: s.time / 60.0 for s in result.snapshots}
            ax.plot([times[i] for i in means.index], means.to_numpy() * 1e3, marker=".", label=result.label)
        ax.set_title("Mean flow latency per snapshot", fontsize=10)
        ax.set_xlabel("Time (min)")
        ax.set_ylabel("Latency (ms)")
        ax.grid(True, alpha=0.3)
        if results:
            ax.legend(fontsize=8)
        return fig

    @staticmethod
    def plot_commodity_series(result: RunResult, commodities: Optional[Sequence[str]] = None,
                              limit: int = 8, ax: Optional[plt.Axes] = None):
        """Latency of selected flights (or satellites) over time; gaps where a commodity was not solved."""
        fig, ax = _axes(ax, (8, 4))
        series = result.latency_series()
        chosen = list(commodities) if commodities is not None else sorted(series)[:limit]
        minutes = np.array([s.time / 60.0 for s in result.snapshots])
        for cid in chosen:
            values = np.array([np.nan if v is None else v * 1e3 for v in series[cid]], dtype=float)
            ax.plot(minutes, values, marker=".", label=cid)
        ax.set_title(f"Latency per commodity: {result.label}", fontsize=10)
        ax.set_xlabel("Time (min)")
        ax.set_ylabel("Latency (ms)")
        ax.grid(True, alpha=0.3)
        if chosen:
            ax.legend(fontsize=7)
        return fig

    @staticmethod
    def plot_utilization(sweep: Sequence[Tuple[float, RunResult, Metrics]], ax: Optional[plt.Axes] = None):
        """Stacked gateway / aircraft destination shares per MEC ratio."""
        fig, ax = _axes(ax, (6, 4))
        labels = [f"{ratio:.0%}" for ratio, _, _ in sweep]
        gateway = np.array([m.destination_shares[NodeKind.GATEWAY.value] for _, _, m in sweep]) * 100
        aircraft = np.array([m.destination_shares[NodeKind.AIRCRAFT.value] for _, _, m in sweep]) * 100
        ax.bar(labels, gateway, label="Gateway", color="tab:green")
        ax.bar(labels, aircraft, bottom=gateway, label="Aircraft", color="tab:orange")
        ax.set_title("MEC utilization by deployment ratio", fontsize=10)
        ax.set_xlabel("Aircraft with MEC")
        ax.set_ylabel("Share of commodities (%)")
        ax.set_ylim(0, 100)
        ax.legend(fontsize=8)
        return fig

    @staticmethod
    def plot_class_latency(metrics: Metrics, ax: Optional[plt.Axes] = None):
        """Latency distribution per service class (or lambda)."""
        fig, ax = _axes(ax, (7, 4))
        records = metrics.records
        classes = sorted(records["class"].unique()) if not records.empty else []
        data = [records.loc[records["class"] == c, "latency"].to_numpy() * 1e3 for c in classes]
        if data:
            ax.boxplot(data, showfliers=False)
            ax.set_xticks(range(1, len(classes) + 1))
            ax.set_xticklabels(classes, fontsize=8)
        ax.set_title(f"Latency per class: {metrics.label}", fontsize=10)
        ax.set_ylabel("Latency (ms)")
        ax.grid(True, axis="y", alpha=0.3)
        return fig

    @staticmethod
    def plot_snapshot(snapshot: Snapshot, ax: Optional[plt.Axes] = None):
        """Ground view: nodes at their sub-points, links as straight lon/lat segments."""
        fig, ax = _axes(ax, (10, 5))
        geo = {n: EarthGeometry.ecef_to_geodetic(p) for n, p in snapshot.positions.items()}
        for link in snapshot.links:
            a, b = geo[link.a], geo[link.b]
            if abs(a.longitude - b.longitude) > 180.0:
                continue
            ax.plot([a.longitude, b.longitude], [a.latitude, b.latitude], color="gray", lw=0.5, alpha=0.5)
        for kind, style in KIND_STYLE.items():
            ids = snapshot.ids_of(kind)
            if not ids:
                continue
            ax.scatter([geo[n].longitude for n in ids], [geo[n].latitude for n in ids],
                       label=kind.value.capitalize(), **style)
        mec = sorted(n for n in snapshot.mec_nodes if snapshot.kind(n) is NodeKind.AIRCRAFT)
        if mec:
            ax.scatter([geo[n].longitude for n in mec], [geo[n].latitude for n in mec],
                       facecolors="none", edgecolors="red", s=90, label="MEC aircraft")
        ax.set_xlim(-180, 180)
        ax.set_ylim(-90, 90)
        ax.set_title(f"Snapshot {snapshot.index} (t = {snapshot.time / 60:.0f} min)", fontsize=10)
        ax.set_xlabel("Longitude (deg)")
        ax.set_ylabel("Latitude (deg)")
        ax.legend(fontsize=8, loc="lower left")
        ax.grid(True, alpha=0.3)
        return fig
