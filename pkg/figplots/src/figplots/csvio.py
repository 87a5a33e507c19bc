"""Reader for the netgrowth visibility-series CSV schema.

The schema is fixed: ``protocol,model,alpha_p,gamma,rank_k,t,
mean_visibility,std_visibility,replicas``.  Files are validated up front so
rendering never meets a malformed column.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

EXPECTED_HEADER = ["protocol", "model", "alpha_p", "gamma", "rank_k", "t",
                   "mean_visibility", "std_visibility", "replicas"]


class SchemaError(ValueError):
    """Raised when a CSV does not conform to the series schema."""


@dataclass
class SeriesTable:
    """One CSV's rows as typed column arrays."""

    path: str
    protocol: np.ndarray        # str
    model: np.ndarray           # str
    alpha_p: np.ndarray         # float
    gamma: np.ndarray           # float, NaN where the column was empty
    rank_k: np.ndarray          # int
    t: np.ndarray               # int
    mean_visibility: np.ndarray # float
    std_visibility: np.ndarray  # float
    replicas: np.ndarray        # int

    def __len__(self) -> int:
        return len(self.t)


def _parse_column(rows, idx, name, path, kind):
    out = []
    for lineno, row in rows:
        raw = row[idx]
        try:
            if kind is float:
                out.append(float(raw) if raw != "" else np.nan)
            elif kind is int:
                out.append(int(raw))
            else:
                out.append(raw)
        except ValueError:
            raise SchemaError(f"{path}:{lineno}: column '{name}' has "
                              f"unparseable value {raw!r}") from None
    dtype = {float: np.float64, int: np.int64, str: object}[kind]
    return np.array(out, dtype=dtype)


def read_series_csv(path) -> SeriesTable:
    """Load and validate one series CSV."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: file is empty (missing header)") from None
            body = [(lineno, row) for lineno, row in enumerate(reader, start=2) if row]
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc

    missing = [c for c in EXPECTED_HEADER if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing column '{missing[0]}'")
    extra = [c for c in header if c not in EXPECTED_HEADER]
    if extra:
        raise SchemaError(f"{path}: unexpected column '{extra[0]}'")
    if header != EXPECTED_HEADER:
        raise SchemaError(f"{path}: columns out of order; expected "
                          f"{','.join(EXPECTED_HEADER)}")
    for lineno, row in body:
        if len(row) != len(EXPECTED_HEADER):
            raise SchemaError(f"{path}:{lineno}: expected {len(EXPECTED_HEADER)} "
                              f"fields, got {len(row)}")

    idx = {name: i for i, name in enumerate(header)}
    kinds = {"protocol": str, "model": str, "alpha_p": float, "gamma": float,
             "rank_k": int, "t": int, "mean_visibility": float,
             "std_visibility": float, "replicas": int}
    columns = {name: _parse_column(body, idx[name], name, path, kind)
               for name, kind in kinds.items()}
    return SeriesTable(path=str(path), **columns)
