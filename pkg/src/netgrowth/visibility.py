"""Per-node visibility: the probability of attracting the next arrival.

For location-free kernels this is one exact normalized vector.  For the
spatial kernel three flavors are provided: the local value (arrival lands
exactly on the node), a Monte-Carlo estimate of the global value (arrival
location averaged out), and a finite-candidate approximation of the maximum
value over all possible arrival locations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .kernels import KernelSpec, multiplicative_beta

NONSPATIAL = "nonspatial"
LOCAL = "local"
GLOBAL_MC = "global_mc"
MAX_GRID = "max_grid"


@dataclass
class VisibilityVector:
    """Visibility values for a set of nodes at one time step."""

    time: int
    variant: str
    node_ids: np.ndarray
    values: np.ndarray
    mc_samples: Optional[int] = None
    mc_stderr: Optional[np.ndarray] = None
    argmax_locations: Optional[np.ndarray] = None


def visibility_nonspatial(state, spec: KernelSpec) -> VisibilityVector:
    """Exact attachment probabilities for a location-free kernel."""
    if spec.kind == kernels.SPATIAL:
        raise ValueError("visibility_nonspatial is undefined for the spatial kernel")
    if state.time < 1:
        raise ValueError("visibility needs a state at time >= 1")
    w = kernels.node_weights(state, spec)
    vals = w / w.sum()
    return VisibilityVector(state.time, NONSPATIAL, np.arange(state.node_count), vals)


def local_visibility(state, i: int, gamma: float, beta: Callable = multiplicative_beta) -> float:
    """Attachment probability to node i for an arrival at i's own location."""
    b = beta(state.fitness, state.degrees)
    decay = np.exp(-gamma * kernels.distances_to(state.locations, state.locations[i]))
    return float(b[i] / np.sum(decay * b))


def local_visibility_all(state, gamma: float, beta: Callable = multiplicative_beta,
                         block: int = 512) -> np.ndarray:
    """Local visibility of every node; pairwise distances evaluated in blocks."""
    locs = state.locations
    b = beta(state.fitness, state.degrees)
    n = state.node_count
    out = np.empty(n, dtype=np.float64)
    for start in range(0, n, block):
        stop = min(start + block, n)
        dx = locs[start:stop, 0, None] - locs[None, :, 0]
        dy = locs[start:stop, 1, None] - locs[None, :, 1]
        denom = (np.exp(-gamma * np.sqrt(dx * dx + dy * dy)) * b).sum(axis=1)
        out[start:stop] = b[start:stop] / denom
    return out


def attachment_probabilities_at(state, gamma: float, beta: Callable, points: np.ndarray) -> np.ndarray:
    """Normalized attachment law for arrivals at each row of ``points``.

    Returns an array of shape (len(points), node_count).  The decay exponent
    is shifted by its per-point minimum before exponentiating (the common
    factor cancels in the normalization), so huge gamma values cannot
    underflow an entire row to zero.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    locs = state.locations
    b = beta(state.fitness, state.degrees)
    dx = pts[:, 0, None] - locs[None, :, 0]
    dy = pts[:, 1, None] - locs[None, :, 1]
    expo = gamma * np.sqrt(dx * dx + dy * dy)
    expo -= expo.min(axis=1, keepdims=True)
    w = np.exp(-expo) * b
    return w / w.sum(axis=1, keepdims=True)


def uniform_locations(m: int, rng: np.random.Generator) -> np.ndarray:
    """m i.i.d. uniform points in the unit square."""
    return rng.random((m, 2))


def global_visibility_mc_all(state, gamma: float, beta: Callable = multiplicative_beta,
                             m: int = 1024, rng: np.random.Generator | None = None,
                             locations: np.ndarray | None = None):
    """Monte-Carlo global visibility of every node with common random locations.

    Returns (estimates, standard errors, locations used).  The same location
    sample feeds every node, so cross-node comparisons share their noise.
    """
    if locations is None:
        if rng is None:
            raise ValueError("need either pre-drawn locations or an rng")
        locations = uniform_locations(m, rng)
    locations = np.atleast_2d(locations)
    m = len(locations)
    if m < 1:
        raise ValueError("need at least one location sample")
    probs = attachment_probabilities_at(state, gamma, beta, locations)
    est = probs.mean(axis=0)
    if m > 1:
        stderr = probs.std(axis=0, ddof=1) / np.sqrt(m)
    else:
        stderr = np.zeros_like(est)
    return est, stderr, locations


def global_visibility_mc(state, i: int, gamma: float, beta: Callable = multiplicative_beta,
                         m: int = 1024, rng: np.random.Generator | None = None,
                         locations: np.ndarray | None = None):
    """Monte-Carlo estimate and standard error of node i's global visibility."""
    est, stderr, _ = global_visibility_mc_all(state, gamma, beta, m=m, rng=rng,
                                              locations=locations)
    return float(est[i]), float(stderr[i])


def candidate_locations(state, i: int, grid_g: int) -> np.ndarray:
    """Search set for the max: node locations, a uniform lattice, and i's own spot."""
    if grid_g < 2:
        raise ValueError(f"grid_g must be >= 2, got {grid_g}")
    axis = np.linspace(0.0, 1.0, grid_g)
    gx, gy = np.meshgrid(axis, axis)
    lattice = np.column_stack([gx.ravel(), gy.ravel()])
    return np.vstack([state.locations, lattice, state.locations[i:i + 1]])


def max_visibility_grid(state, i: int, gamma: float, beta: Callable = multiplicative_beta,
                        grid_g: int = 32):
    """Approximate maximum visibility of node i over candidate arrival spots.

    Returns (max probability, maximizing location).  Node i's own location is
    always a candidate, so the result never falls below its local visibility.
    """
    cands = candidate_locations(state, i, grid_g)
    probs = attachment_probabilities_at(state, gamma, beta, cands)[:, i]
    best = int(np.argmax(probs))
    return float(probs[best]), cands[best].copy()


def visibility_spatial_tracked(state, spec: KernelSpec, node_ids) -> VisibilityVector:
    """Local visibility restricted to the given node ids."""
    ids = np.asarray(node_ids, dtype=np.int64)
    vals = np.array([local_visibility(state, int(i), spec.gamma, spec.beta) for i in ids])
    return VisibilityVector(state.time, LOCAL, ids, vals)
