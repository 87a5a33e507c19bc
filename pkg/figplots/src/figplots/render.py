"""Figure rendering for visibility-series CSVs.

Three figure kinds, all laid out as panel grids with one column per Pareto
shape value:

* ``topk-box``     — rows are growth models; each panel draws one box per
                     recorded time over the tracked ranks' mean visibility.
* ``inject-lines`` — rows are growth models; each panel draws the injected
                     node's mean-visibility line over time.
* ``spatial-grid`` — rows are decay values; panels are box-per-time like
                     topk-box but over local visibility.

Rendering is a pure function of the CSV bytes and the spec: fixed style, no
timestamps, pinned PNG metadata, so re-rendering identical inputs yields an
identical file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvio import SchemaError, SeriesTable, read_series_csv
from .stats import BoxStats, box_stats

KINDS = ("topk-box", "inject-lines", "spatial-grid")
MODEL_ORDER = ("ba", "af", "mf", "gf", "spatial")

STYLE = {
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.size": 9,
    "axes.titlesize": 9,
    "axes.labelsize": 9,
    "lines.linewidth": 1.2,
    "font.family": "DejaVu Sans",
}


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: figure kind, input CSVs, axis scales, output path."""

    kind: str
    csv_paths: tuple[str, ...]
    out_path: str
    log_y: bool = False
    log_x: bool = False

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.csv_paths:
            raise ValueError("need at least one input CSV")


@dataclass
class RenderResult:
    """Where the image landed plus the exact statistics that were drawn."""

    out_path: str
    # (row key, column key) -> {time -> BoxStats} for box panels
    panel_stats: dict = field(default_factory=dict)


def _group_rows(tables: list[SeriesTable], by_gamma: bool):
    """Split rows into (row key, alpha) cells; row key is model or gamma."""
    groups: dict = {}
    for table in tables:
        for j in range(len(table)):
            row_key = float(table.gamma[j]) if by_gamma else str(table.model[j])
            cell = groups.setdefault((row_key, float(table.alpha_p[j])), [])
            cell.append((int(table.rank_k[j]), int(table.t[j]),
                         float(table.mean_visibility[j])))
    return groups


def _grid_keys(groups: dict, by_gamma: bool):
    rows = sorted({k[0] for k in groups})
    if not by_gamma:
        rows = [m for m in MODEL_ORDER if m in rows] + \
               [m for m in sorted(rows) if m not in MODEL_ORDER]
    cols = sorted({k[1] for k in groups})
    return rows, cols


def _annotate_empty(ax):
    ax.text(0.5, 0.5, "no data", ha="center", va="center",
            transform=ax.transAxes, color="0.4")


def _apply_scales(ax, spec: FigureSpec):
    if spec.log_y:
        ax.set_yscale("log")
    if spec.log_x:
        ax.set_xscale("log")


def _box_panel(ax, cell_rows, spec: FigureSpec):
    """One box per recorded time over all tracked ranks; returns the stats."""
    times = sorted({t for _, t, _ in cell_rows})
    stats_by_time = {}
    bxp_stats = []
    for t in times:
        values = [v for _, tt, v in cell_rows if tt == t]
        stats_by_time[t] = box_stats(values)
        bxp_stats.append(stats_by_time[t].as_bxp_dict(t))
    width = 0.6 * min(np.diff(times)) if len(times) > 1 else 0.8
    ax.bxp(bxp_stats, positions=times, widths=width, manage_ticks=False,
           showfliers=True,
           flierprops={"marker": "d", "markersize": 2.5, "markerfacecolor": "0.3",
                       "markeredgecolor": "0.3"},
           medianprops={"color": "tab:orange"},
           boxprops={"color": "tab:blue"},
           whiskerprops={"color": "tab:blue"},
           capprops={"color": "tab:blue"})
    ax.set_xlim(times[0] - width, times[-1] + width)
    _apply_scales(ax, spec)
    return stats_by_time


def _line_panel(ax, cell_rows, spec: FigureSpec):
    """Mean-visibility line of the injected node (rank 0) over time."""
    pts = sorted((t, v) for rank, t, v in cell_rows if rank == 0)
    if not pts:
        _annotate_empty(ax)
        return
    times = [t for t, _ in pts]
    values = [v for _, v in pts]
    ax.plot(times, values, color="tab:blue")
    _apply_scales(ax, spec)


def render(spec: FigureSpec) -> RenderResult:
    """Draw the figure described by ``spec`` and write it to spec.out_path."""
    spec.validate()
    tables = [read_series_csv(p) for p in spec.csv_paths]
    by_gamma = spec.kind == "spatial-grid"
    groups = _group_rows(tables, by_gamma)
    result = RenderResult(out_path=str(spec.out_path))

    with plt.rc_context(STYLE):
        if not groups:
            fig, ax = plt.subplots(figsize=(4.0, 3.0))
            ax.set_xlabel("t")
            ax.set_ylabel("visibility")
            _annotate_empty(ax)
            fig.suptitle(spec.kind)
        else:
            row_keys, col_keys = _grid_keys(groups, by_gamma)
            fig, axes = plt.subplots(len(row_keys), len(col_keys),
                                     figsize=(3.4 * len(col_keys),
                                              2.6 * len(row_keys)),
                                     squeeze=False)
            for ri, row_key in enumerate(row_keys):
                for ci, col_key in enumerate(col_keys):
                    ax = axes[ri][ci]
                    cell = groups.get((row_key, col_key))
                    row_label = (f"gamma={row_key:g}" if by_gamma else row_key)
                    ax.set_title(f"{row_label}, alpha={col_key:g}")
                    if ri == len(row_keys) - 1:
                        ax.set_xlabel("t")
                    if ci == 0:
                        ax.set_ylabel("local visibility" if by_gamma else "visibility")
                    if not cell:
                        _annotate_empty(ax)
                        continue
                    if spec.kind == "inject-lines":
                        _line_panel(ax, cell, spec)
                    else:
                        result.panel_stats[(row_key, col_key)] = \
                            _box_panel(ax, cell, spec)
            fig.tight_layout()
        fig.savefig(spec.out_path, format="png", metadata={"Software": "figplots"})
        plt.close(fig)
    return result
