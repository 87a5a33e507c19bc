"""Figure rendering for netgrowth visibility-series CSVs."""

from .csvio import EXPECTED_HEADER, SchemaError, SeriesTable, read_series_csv
from .render import KINDS, FigureSpec, RenderResult, render
from .stats import BoxStats, box_stats

__version__ = "0.1.0"
