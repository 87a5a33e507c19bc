"""Replica-averaged tracking experiments.

All three protocols share one structure: grow a single base graph to T0,
pick nodes to follow, then spawn R stochastically independent continuations
of that same base graph and average the followed nodes' visibility on a
fixed time grid.  Replicas are pure functions of (master seed, replica
index, base graph), so they can run in parallel and still reduce to
byte-identical results in replica order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graph import (FitnessDistribution, GraphState, RngStream, continue_growth,
                    new_seed_graph)
from .kernels import AF, BA, GF, MF, SPATIAL, KernelSpec
from .visibility import local_visibility_all, visibility_nonspatial

TOPK = "topk"
INJECT = "inject"
SPATIAL_TOPK = "spatial-topk"

TOPK_RANKS = tuple(range(1, 51))
SPATIAL_RANKS = (1, 5, 10, 30, 50, 100, 200)
ALPHA_GRID = (1.0, 2.0, 3.0)
GAMMA_GRID = (5.0, 10.0, 50.0)

PRESETS = {
    "paper": {"T0": 10_000, "T": 100_000, "R": 50, "record_every": 100},
    "ci": {"T0": 1_000, "T": 10_000, "R": 10, "record_every": 100},
}

WORKERS_ENV = "NETGROWTH_WORKERS"


def worker_count(explicit: Optional[int] = None) -> int:
    """Replica parallelism: explicit argument, else the environment, else 1."""
    if explicit is not None:
        if explicit < 1:
            raise ValueError(f"worker count must be >= 1, got {explicit}")
        return explicit
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    count = int(raw)
    if count < 1:
        raise ValueError(f"{WORKERS_ENV} must be >= 1, got {count}")
    return count


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything a protocol run depends on, seed included."""

    protocol: str
    kernel: KernelSpec
    alpha_p: float
    T0: int
    T: int
    R: int
    ranks: tuple[int, ...] = TOPK_RANKS
    record_every: int = 100
    master_seed: int = 0

    def validate(self) -> None:
        if self.protocol not in (TOPK, INJECT, SPATIAL_TOPK):
            raise ValueError(f"unknown protocol {self.protocol!r}")
        self.kernel.validate()
        if not self.alpha_p > 0:
            raise ValueError(f"alpha_p must be > 0, got {self.alpha_p}")
        # T == T0 is tolerated as the degenerate "no continuation" case
        floor = self.T0 + 1 if self.protocol == INJECT else self.T0
        if not (self.T >= floor and self.T0 >= 2):
            raise ValueError(f"need T >= {floor} and T0 >= 2, got T0={self.T0}, T={self.T}")
        if self.R < 1:
            raise ValueError(f"need at least one replica, got R={self.R}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")
        if self.protocol == TOPK and self.kernel.kind not in (BA, AF, MF, GF):
            raise ValueError(f"topk protocol needs a location-free kernel, got {self.kernel.kind!r}")
        if self.protocol == INJECT and self.kernel.kind not in (AF, MF, GF):
            raise ValueError("inject protocol needs a fitness-bearing location-free kernel "
                             f"(af, mf or gf), got {self.kernel.kind!r}")
        if self.protocol == SPATIAL_TOPK and self.kernel.kind != SPATIAL:
            raise ValueError(f"spatial-topk protocol needs the spatial kernel, got {self.kernel.kind!r}")
        if self.protocol != INJECT:
            if not self.ranks:
                raise ValueError("need at least one tracked rank")
            if min(self.ranks) < 1:
                raise ValueError(f"ranks must be >= 1, got {min(self.ranks)}")
            if max(self.ranks) > self.T0 + 1:
                raise ValueError(f"rank {max(self.ranks)} exceeds node count {self.T0 + 1} at T0")

    def fitness_distribution(self) -> FitnessDistribution:
        return FitnessDistribution(alpha_p=self.alpha_p)

    def gamma_or_none(self) -> Optional[float]:
        return self.kernel.gamma if self.kernel.kind == SPATIAL else None


@dataclass
class TrackedSeries:
    """Replica-averaged visibility of the rank-k nodes chosen at T0."""

    protocol: str
    model: str
    alpha_p: float
    gamma: Optional[float]
    ranks: tuple[int, ...]
    node_ids: dict[int, int]            # rank -> node id at T0
    times: np.ndarray                   # (G,)
    mean: np.ndarray                    # (K, G)
    std: np.ndarray                     # (K, G)
    replicas: int
    per_replica: Optional[np.ndarray] = field(default=None, repr=False)  # (R, K, G)
    base_state: Optional[GraphState] = field(default=None, repr=False)

    def rows(self):
        """CSV-schema rows: (protocol, model, alpha_p, gamma, rank, t, mean, std, R)."""
        for ki, rank in enumerate(self.ranks):
            for gi, t in enumerate(self.times):
                yield (self.protocol, self.model, self.alpha_p, self.gamma, int(rank),
                       int(t), float(self.mean[ki, gi]), float(self.std[ki, gi]),
                       self.replicas)


@dataclass
class InjectedNodeSeries:
    """Replica-averaged visibility of one high-fitness node injected at T0+1."""

    protocol: str
    model: str
    alpha_p: float
    gamma: Optional[float]
    injected_node: int
    injected_fitness: float
    times: np.ndarray                   # (G,) times strictly after T0
    mean: np.ndarray                    # (G,)
    std: np.ndarray
    max_other_mean: np.ndarray          # replica-averaged max visibility among other nodes
    replicas: int
    per_replica: Optional[np.ndarray] = field(default=None, repr=False)
    base_state: Optional[GraphState] = field(default=None, repr=False)

    def rows(self):
        """CSV-schema rows; the injected node is reported as rank 0."""
        for gi, t in enumerate(self.times):
            yield (self.protocol, self.model, self.alpha_p, self.gamma, 0, int(t),
                   float(self.mean[gi]), float(self.std[gi]), self.replicas)


def _rank_order(values: np.ndarray) -> np.ndarray:
    """Node ids ordered by descending value; ties go to the smaller id."""
    return np.lexsort((np.arange(len(values)), -values))


def _grid_times(T0: int, T: int, record_every: int) -> np.ndarray:
    times = list(range(T0, T + 1, record_every))
    if times[-1] != T:
        times.append(T)
    return np.asarray(times, dtype=np.int64)


def _aggregate(per_replica: np.ndarray):
    mean = per_replica.mean(axis=0)
    if per_replica.shape[0] > 1:
        std = per_replica.std(axis=0, ddof=1)
    else:
        std = np.zeros_like(mean)
    return mean, std


def _tracked_replica(args):
    """One continuation following fixed node ids; returns a (K, G-1) array."""
    spec, base, tracked_ids, replica = args
    rng = RngStream(spec.master_seed, replica).generator()
    snaps, _ = continue_growth(base.copy(reserve=spec.T + 1), spec.kernel,
                               spec.fitness_distribution(), spec.T, rng,
                               record_every=spec.record_every,
                               record_phase=spec.T0 % spec.record_every,
                               track_nodes=tracked_ids)
    return np.column_stack([s.visibility.values for s in snaps])


def _injected_replica(args):
    """One continuation with the overridden arrival; returns (G-1, 2) values.

    Column 0 is the injected node's visibility, column 1 the maximum
    visibility among all other nodes, on the recording grid after T0.
    """
    spec, base, injected_fitness, replica = args
    injected = spec.T0 + 1
    rng = RngStream(spec.master_seed, replica).generator()
    snaps, _ = continue_growth(base.copy(reserve=spec.T + 1), spec.kernel,
                               spec.fitness_distribution(), spec.T, rng,
                               record_every=spec.record_every,
                               record_phase=spec.T0 % spec.record_every,
                               fitness_override=(injected, injected_fitness))
    out = np.empty((len(snaps), 2), dtype=np.float64)
    for si, snap in enumerate(snaps):
        vals = snap.visibility.values
        out[si, 0] = vals[injected]
        best_other = vals[:injected].max()
        if len(vals) > injected + 1:
            best_other = max(best_other, vals[injected + 1:].max())
        out[si, 1] = best_other
    return out


def _run_replicas(job, args_list, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, args_list))
    return [job(a) for a in args_list]


def _grow_base(spec: ExperimentSpec) -> GraphState:
    rng = RngStream(spec.master_seed, 0).generator()
    seed = new_seed_graph(spec.kernel, spec.fitness_distribution(), rng)
    _, base = continue_growth(seed, spec.kernel, spec.fitness_distribution(),
                              spec.T0, rng)
    return base


def experiment_topk(spec: ExperimentSpec, workers: Optional[int] = None) -> TrackedSeries:
    """Track the visibility of the rank-k nodes (by visibility at T0)."""
    spec.validate()
    if spec.protocol != TOPK:
        raise ValueError(f"experiment_topk got protocol {spec.protocol!r}")
    base = _grow_base(spec)
    base_values = visibility_nonspatial(base, spec.kernel).values
    return _track_and_average(spec, base, base_values, workers)


def experiment_spatial(spec: ExperimentSpec, workers: Optional[int] = None) -> TrackedSeries:
    """Track the local visibility of the rank-k nodes (by local visibility at T0)."""
    spec.validate()
    if spec.protocol != SPATIAL_TOPK:
        raise ValueError(f"experiment_spatial got protocol {spec.protocol!r}")
    base = _grow_base(spec)
    base_values = local_visibility_all(base, spec.kernel.gamma, spec.kernel.beta)
    return _track_and_average(spec, base, base_values, workers)


def _track_and_average(spec: ExperimentSpec, base: GraphState,
                       base_values: np.ndarray, workers: Optional[int]) -> TrackedSeries:
    order = _rank_order(base_values)
    tracked_ids = np.array([order[r - 1] for r in spec.ranks], dtype=np.int64)
    times = _grid_times(spec.T0, spec.T, spec.record_every)
    per_replica = np.empty((spec.R, len(spec.ranks), len(times)), dtype=np.float64)
    per_replica[:, :, 0] = base_values[tracked_ids]       # shared T0 column
    if spec.T > spec.T0:
        args = [(spec, base, tracked_ids, r) for r in range(1, spec.R + 1)]
        results = _run_replicas(_tracked_replica, args, worker_count(workers))
        for ri, res in enumerate(results):
            per_replica[ri, :, 1:] = res
    mean, std = _aggregate(per_replica)
    return TrackedSeries(
        protocol=spec.protocol, model=spec.kernel.kind, alpha_p=spec.alpha_p,
        gamma=spec.gamma_or_none(), ranks=tuple(spec.ranks),
        node_ids={int(r): int(order[r - 1]) for r in spec.ranks},
        times=times, mean=mean, std=std, replicas=spec.R,
        per_replica=per_replica, base_state=base,
    )


def experiment_inject(spec: ExperimentSpec, workers: Optional[int] = None) -> InjectedNodeSeries:
    """Track a node injected at T0+1 with twice the base graph's top fitness."""
    spec.validate()
    if spec.protocol != INJECT:
        raise ValueError(f"experiment_inject got protocol {spec.protocol!r}")
    base = _grow_base(spec)
    injected_fitness = 2.0 * float(base.fitness.max())
    times = _grid_times(spec.T0, spec.T, spec.record_every)[1:]   # node exists only after T0
    args = [(spec, base, injected_fitness, r) for r in range(1, spec.R + 1)]
    results = _run_replicas(_injected_replica, args, worker_count(workers))

    per_replica = np.stack(results)                      # (R, G, 2)
    mean, std = _aggregate(per_replica[:, :, 0])
    max_other_mean = per_replica[:, :, 1].mean(axis=0)
    return InjectedNodeSeries(
        protocol=spec.protocol, model=spec.kernel.kind, alpha_p=spec.alpha_p,
        gamma=spec.gamma_or_none(), injected_node=spec.T0 + 1,
        injected_fitness=injected_fitness, times=times, mean=mean, std=std,
        max_other_mean=max_other_mean, replicas=spec.R,
        per_replica=per_replica[:, :, 0], base_state=base,
    )
