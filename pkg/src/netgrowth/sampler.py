"""Dynamic weighted sampling.

``WeightIndex`` keeps per-node weights under a Fenwick (binary indexed) tree
so the growth loop can draw an attachment target, bump the target's weight,
and append the newcomer's weight in logarithmic time.  The spatial kernel
cannot use the index (weights change with every arrival's location), so a
linear-scan helper is provided for it.
"""

from __future__ import annotations

import numpy as np

from . import kernels

# Mutations between from-scratch rebuilds; bounds accumulated float drift.
REBUILD_INTERVAL = 1 << 16


class WeightIndex:
    """Prefix-sum tree over strictly positive float weights.

    ``sample(u)`` maps u in [0, 1) to the index whose cumulative-weight
    half-open interval [C(i-1), C(i)) contains u * total().  Raw weights are
    stored exactly; only the tree's internal sums can drift, and a periodic
    rebuild keeps that drift below ~1e-9 relative.
    """

    __slots__ = ("_raw", "_tree", "_n", "_cap", "_top", "_mutations")

    def __init__(self, weights=(), capacity: int | None = None):
        weights = np.asarray(weights, dtype=np.float64)
        n = len(weights)
        if n and not np.all(weights > 0.0):
            bad = int(np.argmin(weights > 0.0))
            raise ValueError(f"weights must be strictly positive; weight[{bad}] = {weights[bad]}")
        cap = max(int(capacity or 0), n, 1)
        self._raw = np.zeros(cap, dtype=np.float64)
        self._raw[:n] = weights
        self._n = n
        self._cap = cap
        self._top = 1 << (cap.bit_length() - 1)
        self._mutations = 0
        self._tree = np.zeros(cap + 1, dtype=np.float64)
        self._build_tree()

    def __len__(self) -> int:
        return self._n

    def weight(self, i: int) -> float:
        self._check_index(i)
        return float(self._raw[i])

    def weights(self) -> np.ndarray:
        """Copy of the stored raw weights."""
        return self._raw[:self._n].copy()

    def total(self) -> float:
        """Sum of all active weights (via prefix query)."""
        return self._prefix(self._n)

    def update(self, i: int, new_weight: float) -> None:
        """Replace weight i; O(log capacity)."""
        self._check_index(i)
        if not new_weight > 0.0:
            raise ValueError(f"new weight must be strictly positive, got {new_weight}")
        delta = new_weight - self._raw[i]
        self._raw[i] = new_weight
        self._add(i + 1, delta)
        self._count_mutation()

    def append(self, weight: float) -> None:
        """Add a new trailing weight, growing capacity as needed."""
        if not weight > 0.0:
            raise ValueError(f"appended weight must be strictly positive, got {weight}")
        if self._n == self._cap:
            self._grow(2 * self._cap)
        self._raw[self._n] = weight
        self._n += 1
        self._add(self._n, weight)
        self._count_mutation()

    def sample(self, u: float) -> int:
        """Index i with u * total() in [C(i-1), C(i)); deterministic in u."""
        if self._n == 0:
            raise ValueError("cannot sample from an empty index")
        if not 0.0 <= u < 1.0:
            raise ValueError(f"u must lie in [0, 1), got {u}")
        tot = self.total()
        if not tot > 0.0:
            raise ValueError("cannot sample: total weight is not positive")
        remaining = u * tot
        pos = 0
        step = self._top
        while step:
            nxt = pos + step
            if nxt <= self._cap and self._tree[nxt] <= remaining:
                remaining -= self._tree[nxt]
                pos = nxt
            step >>= 1
        # pos == n can only happen through float rounding at the right edge
        return min(pos, self._n - 1)

    # -- internals ---------------------------------------------------------

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self._n:
            raise ValueError(f"index {i} out of range for {self._n} weights")

    def _add(self, pos: int, delta: float) -> None:
        while pos <= self._cap:
            self._tree[pos] += delta
            pos += pos & -pos

    def _prefix(self, pos: int) -> float:
        s = 0.0
        tree = self._tree
        while pos > 0:
            s += tree[pos]
            pos -= pos & -pos
        return float(s)

    def _build_tree(self) -> None:
        tree = self._tree
        tree[:] = 0.0
        tree[1:self._n + 1] = self._raw[:self._n]
        for pos in range(1, self._cap + 1):
            parent = pos + (pos & -pos)
            if parent <= self._cap:
                tree[parent] += tree[pos]

    def _grow(self, new_cap: int) -> None:
        raw = np.zeros(new_cap, dtype=np.float64)
        raw[:self._n] = self._raw[:self._n]
        self._raw = raw
        self._cap = new_cap
        self._top = 1 << (new_cap.bit_length() - 1)
        self._tree = np.zeros(new_cap + 1, dtype=np.float64)
        self._build_tree()

    def _count_mutation(self) -> None:
        self._mutations += 1
        if self._mutations >= REBUILD_INTERVAL:
            self._mutations = 0
            self._build_tree()


def pick_from_weights(weights: np.ndarray, u: float, total: float | None = None) -> int:
    """One-shot inverse-CDF pick over a weight vector (linear scan).

    Uses the same half-open interval convention as ``WeightIndex.sample``.
    """
    if len(weights) == 0:
        raise ValueError("cannot sample from an empty weight vector")
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u}")
    cum = np.cumsum(weights)
    tot = cum[-1] if total is None else total
    if not tot > 0.0:
        raise ValueError("cannot sample: total weight is not positive")
    idx = int(np.searchsorted(cum, u * tot, side="right"))
    return min(idx, len(weights) - 1)


def sample_spatial(state, spec, new_location, u: float) -> int:
    """Draw the attachment target for a spatial arrival at ``new_location``."""
    if spec.kind != kernels.SPATIAL:
        raise ValueError(f"sample_spatial needs a spatial kernel, got {spec.kind!r}")
    w = kernels.spatial_weights(state, spec, new_location)
    return pick_from_weights(w, u)
