"""Box statistics used by the renderer.

Quartiles use linear interpolation on the sorted sample; whiskers extend to
the most extreme data points within 1.5 * IQR of the quartiles, and anything
beyond is an outlier (flier).  The renderer draws exactly these numbers, so
tests can recompute them independently and compare.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoxStats:
    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    fliers: tuple[float, ...]

    def as_bxp_dict(self, label) -> dict:
        return {"med": self.median, "q1": self.q1, "q3": self.q3,
                "whislo": self.whisker_low, "whishi": self.whisker_high,
                "fliers": list(self.fliers), "label": str(label)}


def box_stats(values) -> BoxStats:
    """Median, quartiles, 1.5*IQR whiskers, and fliers for one sample."""
    data = np.asarray(values, dtype=np.float64)
    if data.size == 0:
        raise ValueError("cannot compute box statistics of an empty sample")
    q1, med, q3 = np.percentile(data, [25.0, 50.0, 75.0])
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = data[(data >= lo_fence) & (data <= hi_fence)]
    whisker_low = float(inside.min())
    whisker_high = float(inside.max())
    fliers = tuple(sorted(float(x) for x in data[(data < lo_fence) | (data > hi_fence)]))
    return BoxStats(median=float(med), q1=float(q1), q3=float(q3),
                    whisker_low=whisker_low, whisker_high=whisker_high,
                    fliers=fliers)
