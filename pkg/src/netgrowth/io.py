"""CSV emission and canonical graph snapshots.

All floats are written with 17 significant digits, which round-trips IEEE
doubles exactly and keeps every output byte-reproducible.
"""

from __future__ import annotations

import os
from typing import Iterable

import numpy as np

from .analytics import LemmaReport
from .graph import GraphState

SERIES_HEADER = ("protocol", "model", "alpha_p", "gamma", "rank_k", "t",
                 "mean_visibility", "std_visibility", "replicas")
LEMMA_HEADER = ("lemma_id", "t", "node", "analytic", "lower", "upper",
                "enumerated", "mc_mean", "mc_stderr", "verdict")

SNAPSHOT_MAGIC = "netgrowth-snapshot"
SNAPSHOT_VERSION = 1


def format_float(x: float) -> str:
    """Decimal form with 17 significant digits (exact double round-trip)."""
    return f"{x:.17g}"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def write_series_csv(series_list, path) -> None:
    """Write one or more tracked/injected series, sorted by (rank_k, t).

    Accepts a single series object or an iterable of them; each must provide
    ``rows()`` yielding tuples in the series CSV schema.
    """
    if hasattr(series_list, "rows"):
        series_list = [series_list]
    rows = []
    for series in series_list:
        rows.extend(series.rows())
    rows.sort(key=lambda r: (r[4], r[5]))
    _write_csv(path, SERIES_HEADER, rows)


def write_lemma_csv(reports: Iterable[LemmaReport], path) -> None:
    """Write verification reports in the lemma CSV schema."""
    rows = [(r.lemma_id, r.t, r.node, r.analytic, r.lower, r.upper,
             r.enumerated, r.mc_mean, r.mc_stderr, r.verdict)
            for r in reports]
    _write_csv(path, LEMMA_HEADER, rows)


def _write_csv(path, header, rows) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_cell(v) for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def dump_snapshot(state: GraphState) -> str:
    """Canonical text serialization of (time, per-node degree/fitness/location).

    Layout (version 1): a magic+version line, three ``key value`` lines
    (time, nodes, edges), a column header, one space-separated line per node
    in id order, then one ``child parent`` line per logged edge.  Floats use
    17 significant digits, so load(dump(state)) is exact and re-dumping is
    byte-identical.
    """
    lines = [f"{SNAPSHOT_MAGIC} {SNAPSHOT_VERSION}",
             f"time {state.time}",
             f"nodes {state.node_count}",
             f"edges {len(state.edge_log) if state.edge_log is not None else -1}",
             "degree fitness x y"]
    deg = state.degrees
    fit = state.fitness
    loc = state.locations
    for i in range(state.node_count):
        lines.append(f"{deg[i]} {format_float(fit[i])} "
                     f"{format_float(loc[i, 0])} {format_float(loc[i, 1])}")
    if state.edge_log is not None:
        for child, parent in state.edge_log:
            lines.append(f"{child} {parent}")
    return "\n".join(lines) + "\n"


def load_snapshot_text(text: str) -> GraphState:
    """Inverse of dump_snapshot."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith(SNAPSHOT_MAGIC):
        raise ValueError("not a netgrowth snapshot (bad magic line)")
    version = int(lines[0].split()[1])
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    time = int(lines[1].split()[1])
    nodes = int(lines[2].split()[1])
    edges = int(lines[3].split()[1])
    if lines[4] != "degree fitness x y":
        raise ValueError("unexpected snapshot column header")
    deg = np.empty(nodes, dtype=np.int64)
    fit = np.empty(nodes, dtype=np.float64)
    loc = np.empty((nodes, 2), dtype=np.float64)
    for i in range(nodes):
        d, f, x, y = lines[5 + i].split()
        deg[i] = int(d)
        fit[i] = float(f)
        loc[i, 0] = float(x)
        loc[i, 1] = float(y)
    edge_log = None
    if edges >= 0:
        edge_log = []
        for j in range(edges):
            c, p = lines[5 + nodes + j].split()
            edge_log.append((int(c), int(p)))
    return GraphState(time, deg, fit, loc, edge_log=edge_log)


def save_snapshot(state: GraphState, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(dump_snapshot(state))
    except OSError as exc:
        raise OSError(f"cannot write snapshot to {path}: {exc}") from exc


def load_snapshot(path) -> GraphState:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read snapshot from {path}: {exc}") from exc
    return load_snapshot_text(text)


def ensure_dir(path) -> None:
    os.makedirs(path, exist_ok=True)
