"""Evolving graph state and the one-arrival-per-step growth loop.

The state keeps arrival-ordered node attributes (degree, fitness, location)
plus logical time; that triple is the full sufficient statistic for every
attachment rule, so adjacency is only retained when edge logging is turned
on explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .kernels import SPATIAL, KernelSpec
from .sampler import WeightIndex, pick_from_weights
from .visibility import (NONSPATIAL, LOCAL, VisibilityVector,
                         visibility_spatial_tracked)


@dataclass(frozen=True)
class RngStream:
    """Seed recipe for one replica's random stream.

    Identical (master_seed, replica_index) pairs reproduce the exact same
    trajectory; distinct replica indices give statistically independent
    streams.  Index 0 is used for base-graph growth, 1..R for replicas.
    """

    master_seed: int
    replica_index: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master_seed,
                                     spawn_key=(self.replica_index,))
        return np.random.default_rng(seq)


@dataclass(frozen=True)
class FitnessDistribution:
    """Pareto fitness law: survival (x_min/x)**alpha_p for x >= x_min."""

    alpha_p: float
    x_min: float = 1.0
    kind: str = "pareto"

    def validate(self) -> None:
        if self.kind != "pareto":
            raise ValueError(f"unsupported fitness distribution kind {self.kind!r}")
        if not (np.isfinite(self.alpha_p) and self.alpha_p > 0.0):
            raise ValueError(f"alpha_p must be finite and > 0, got {self.alpha_p}")
        if not (np.isfinite(self.x_min) and self.x_min > 0.0):
            raise ValueError(f"x_min must be finite and > 0, got {self.x_min}")

    def sample(self, rng: np.random.Generator, size=None):
        # inverse CDF with u = 1 - U in (0, 1], so draws are finite and >= x_min
        u = rng.random(size)
        return self.x_min * (1.0 - u) ** (-1.0 / self.alpha_p)


@dataclass(frozen=True)
class NodeRecord:
    """Read-only view of one node's attributes."""

    index: int
    degree: int
    fitness: float
    location: tuple[float, float]


class GraphState:
    """Arrival-ordered node attributes plus logical time.

    Node ids are dense 0..t at time t (id == arrival step).  Mutating methods
    are meant for a single replica's growth loop; copies are cheap and safe
    to hand to other threads or processes.
    """

    __slots__ = ("time", "_deg", "_fit", "_loc", "edge_log")

    def __init__(self, time: int, degrees, fitness, locations, edge_log=None):
        n = time + 1
        degrees = np.asarray(degrees, dtype=np.int64)
        fitness = np.asarray(fitness, dtype=np.float64)
        locations = np.asarray(locations, dtype=np.float64).reshape(-1, 2)
        if not (len(degrees) == len(fitness) == len(locations) == n):
            raise ValueError(f"state at time {time} needs exactly {n} node records")
        self.time = time
        self._deg = degrees.copy()
        self._fit = fitness.copy()
        self._loc = locations.copy()
        self.edge_log = list(edge_log) if edge_log is not None else None

    @property
    def node_count(self) -> int:
        return self.time + 1

    @property
    def degrees(self) -> np.ndarray:
        return self._deg[:self.node_count]

    @property
    def fitness(self) -> np.ndarray:
        return self._fit[:self.node_count]

    @property
    def locations(self) -> np.ndarray:
        return self._loc[:self.node_count]

    def node(self, i: int) -> NodeRecord:
        if not 0 <= i < self.node_count:
            raise ValueError(f"node {i} does not exist at time {self.time}")
        return NodeRecord(i, int(self._deg[i]), float(self._fit[i]),
                          (float(self._loc[i, 0]), float(self._loc[i, 1])))

    def reserve(self, capacity: int) -> None:
        """Preallocate room for ``capacity`` nodes to keep appends cheap."""
        if capacity <= len(self._deg):
            return
        deg = np.zeros(capacity, dtype=np.int64)
        fit = np.zeros(capacity, dtype=np.float64)
        loc = np.zeros((capacity, 2), dtype=np.float64)
        n = self.node_count
        deg[:n] = self._deg[:n]
        fit[:n] = self._fit[:n]
        loc[:n] = self._loc[:n]
        self._deg, self._fit, self._loc = deg, fit, loc

    def increment_degree(self, i: int) -> int:
        self._deg[i] += 1
        return int(self._deg[i])

    def append_node(self, fitness: float, location) -> int:
        """Add the next arrival with degree 1; returns its id and bumps time."""
        n = self.node_count
        if n == len(self._deg):
            self.reserve(max(2 * n, 16))
        self._deg[n] = 1
        self._fit[n] = fitness
        self._loc[n, 0] = location[0]
        self._loc[n, 1] = location[1]
        self.time += 1
        return n

    def copy(self, reserve: int = 0) -> "GraphState":
        out = GraphState(self.time, self.degrees, self.fitness, self.locations,
                         edge_log=self.edge_log)
        if reserve:
            out.reserve(reserve)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphState):
            return NotImplemented
        return (self.time == other.time
                and np.array_equal(self.degrees, other.degrees)
                and np.array_equal(self.fitness, other.fitness)
                and np.array_equal(self.locations, other.locations)
                and self.edge_log == other.edge_log)

    def __repr__(self) -> str:
        return f"GraphState(time={self.time}, nodes={self.node_count})"

    # pickling support for worker processes (slots class)
    def __getstate__(self):
        return (self.time, self.degrees.copy(), self.fitness.copy(),
                self.locations.copy(), self.edge_log)

    def __setstate__(self, payload):
        time, deg, fit, loc, log = payload
        self.time = time
        self._deg, self._fit, self._loc = deg, fit, loc
        self.edge_log = log


@dataclass
class GrowthSnapshot:
    """Visibility record plus the exact degree total at one time step."""

    time: int
    degree_sum: int
    visibility: VisibilityVector


def new_seed_graph(kernel: KernelSpec, fitness_dist: FitnessDistribution,
                   rng: np.random.Generator, log_edges: bool = False) -> GraphState:
    """Two nodes joined by one edge at time 1, attributes freshly drawn.

    This start keeps the degree total exactly 2*t from the outset and leaves
    no node with zero attachment weight under any kernel.
    """
    kernel.validate()
    fitness_dist.validate()
    fits = []
    locs = []
    for _ in range(2):
        fits.append(float(fitness_dist.sample(rng)))
        locs.append(rng.random(2))
    state = GraphState(1, [1, 1], fits, np.array(locs),
                       edge_log=[(1, 0)] if log_edges else None)
    return state


def _draw_attributes(fitness_dist: FitnessDistribution, rng: np.random.Generator):
    fit = float(fitness_dist.sample(rng))
    loc = rng.random(2)
    return fit, loc


def grow_step(state: GraphState, kernel: KernelSpec, fitness_dist: FitnessDistribution,
              rng: np.random.Generator):
    """One arrival: draw its attributes, pick a target, attach, advance time.

    Returns (state, target id).  The state is mutated in place.  The new
    node only joins the candidate pool from the following step onward.
    """
    if state.time < 1:
        raise ValueError("grow_step needs a state at time >= 1")
    kernel.validate()
    fit, loc = _draw_attributes(fitness_dist, rng)
    u = rng.random()
    if kernel.kind == SPATIAL:
        w = kernels.spatial_weights(state, kernel, loc)
    else:
        w = kernels.node_weights(state, kernel)
    total = float(w.sum())
    if not total > 0.0:
        raise RuntimeError(f"total attachment weight {total} is not positive at t={state.time}")
    target = pick_from_weights(w, u, total)
    state.increment_degree(target)
    new_id = state.append_node(fit, loc)
    if state.edge_log is not None:
        state.edge_log.append((new_id, target))
    return state, target


def _take_snapshot(state: GraphState, kernel: KernelSpec,
                   track_nodes: Optional[Sequence[int]]) -> GrowthSnapshot:
    degree_sum = int(state.degrees.sum())
    if kernel.kind != SPATIAL:
        w = kernels.node_weights(state, kernel)
        total = float(w.sum())
        if track_nodes is None:
            ids = np.arange(state.node_count)
            vals = w / total
        else:
            ids = np.asarray(track_nodes, dtype=np.int64)
            vals = w[ids] / total
        vis = VisibilityVector(state.time, NONSPATIAL, ids, vals)
    elif track_nodes is None:
        vis = VisibilityVector(state.time, LOCAL,
                               np.empty(0, dtype=np.int64), np.empty(0))
    else:
        vis = visibility_spatial_tracked(state, kernel, track_nodes)
    return GrowthSnapshot(state.time, degree_sum, vis)


def continue_growth(state: GraphState, kernel: KernelSpec, fitness_dist: FitnessDistribution,
                    T: int, rng: np.random.Generator, *, record_every: int = 0,
                    record_phase: int = 0, track_nodes: Optional[Sequence[int]] = None,
                    fitness_override: Optional[tuple[int, float]] = None):
    """Grow ``state`` in place until time T; returns (snapshots, state).

    Snapshots are taken whenever time falls on the recording grid
    (time % record_every == record_phase % record_every) and always at T;
    record_every=0 disables recording.  ``fitness_override=(arrival, value)``
    forces the fitness of the node arriving at that time (the draw is still
    consumed, so overridden and plain runs stay stream-aligned).
    """
    if T < state.time:
        raise ValueError(f"T={T} is before the state's current time {state.time}")
    kernel.validate()
    fitness_dist.validate()
    spatial = kernel.kind == SPATIAL
    state.reserve(T + 1)
    snapshots: list[GrowthSnapshot] = []
    phase = record_phase % record_every if record_every else 0
    log = state.edge_log

    if not spatial:
        index = WeightIndex(kernels.node_weights(state, kernel), capacity=T + 1)

    while state.time < T:
        arrival = state.time + 1
        fit, loc = _draw_attributes(fitness_dist, rng)
        if fitness_override is not None and arrival == fitness_override[0]:
            fit = float(fitness_override[1])
        u = rng.random()
        if spatial:
            w = kernels.spatial_weights(state, kernel, loc)
            total = float(w.sum())
            if not total > 0.0:
                raise RuntimeError(f"total attachment weight {total} is not positive "
                                   f"at t={state.time}")
            target = pick_from_weights(w, u, total)
        else:
            target = index.sample(u)
        new_degree = state.increment_degree(target)
        if not spatial:
            index.update(target, kernels.attachment_weight(
                kernel, float(state.fitness[target]), new_degree))
        new_id = state.append_node(fit, loc)
        if not spatial:
            index.append(kernels.new_node_weight(kernel, fit))
        if log is not None:
            log.append((new_id, target))
        if record_every and state.time % record_every == phase:
            snapshots.append(_take_snapshot(state, kernel, track_nodes))

    if record_every and (not snapshots or snapshots[-1].time != state.time):
        snapshots.append(_take_snapshot(state, kernel, track_nodes))
    return snapshots, state


def run_growth(kernel: KernelSpec, fitness_dist: FitnessDistribution, T: int,
               rng: np.random.Generator, *, record_every: int = 100,
               track_nodes: Optional[Sequence[int]] = None, log_edges: bool = False):
    """Grow a fresh graph from the seed to time T; returns (snapshots, state)."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if record_every < 1:
        raise ValueError(f"record_every must be >= 1, got {record_every}")
    state = new_seed_graph(kernel, fitness_dist, rng, log_edges=log_edges)
    return continue_growth(state, kernel, fitness_dist, T, rng,
                           record_every=record_every, track_nodes=track_nodes)
