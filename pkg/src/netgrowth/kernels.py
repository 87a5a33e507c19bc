"""Attachment rules: per-node weights for the five growth kernels.

A kernel assigns every existing node an unnormalized weight; the incoming
node attaches to node i with probability weight(i) / sum of weights.  For
the spatial kernel the weight additionally depends on where the incoming
node lands, so callers must supply that location.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

BA = "ba"
AF = "af"
MF = "mf"
GF = "gf"
SPATIAL = "spatial"

KINDS = (BA, AF, MF, GF, SPATIAL)
NONSPATIAL_KINDS = (BA, AF, MF, GF)


def quadratic_rule(fitness, degree):
    """Default nonlinear attachment rule: squared fitness-degree product."""
    return (fitness * degree) ** 2


def multiplicative_beta(fitness, degree):
    """Default spatial fitness-degree factor: plain product."""
    return fitness * degree


@dataclass(frozen=True)
class KernelSpec:
    """Which attachment rule is in force, plus its parameters.

    ``g`` is only consulted for the ``gf`` kind, ``gamma``/``beta`` only for
    ``spatial``.  Custom ``g``/``beta`` callables must accept both scalars
    and numpy arrays and stay strictly positive for fitness >= 1, degree >= 1.
    """

    kind: str
    g: Callable = quadratic_rule
    gamma: float = 0.0
    beta: Callable = multiplicative_beta

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if not (np.isfinite(self.gamma) and self.gamma >= 0.0):
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma}")


def attachment_weight(spec: KernelSpec, fitness, degree):
    """Location-free weight of a node with the given fitness and degree.

    Works elementwise on arrays.  For the spatial kernel this is the
    fitness-degree factor only (the distance decay is applied separately).
    """
    if spec.kind == BA:
        return degree * 1.0
    if spec.kind == AF:
        return fitness + degree
    if spec.kind == MF:
        return fitness * degree
    if spec.kind == GF:
        return spec.g(fitness, degree)
    if spec.kind == SPATIAL:
        return spec.beta(fitness, degree)
    raise ValueError(f"unknown kernel kind {spec.kind!r}")


def new_node_weight(spec: KernelSpec, fitness: float) -> float:
    """Weight a freshly attached node (degree 1) contributes to the pool."""
    return float(attachment_weight(spec, fitness, 1))


def distances_to(locations: np.ndarray, point) -> np.ndarray:
    """Euclidean distances from every row of ``locations`` to ``point``."""
    dx = locations[:, 0] - point[0]
    dy = locations[:, 1] - point[1]
    return np.sqrt(dx * dx + dy * dy)


def node_weights(state, spec: KernelSpec) -> np.ndarray:
    """Weight vector over all current nodes for a location-free kernel."""
    if spec.kind == SPATIAL:
        raise ValueError("spatial kernel weights require the incoming node's location; "
                         "use spatial_weights")
    return np.asarray(attachment_weight(spec, state.fitness, state.degrees), dtype=np.float64)


def spatial_weights(state, spec: KernelSpec, new_location) -> np.ndarray:
    """Weight vector seen by an arrival landing at ``new_location``."""
    if spec.kind != SPATIAL:
        raise ValueError(f"spatial_weights called with kernel kind {spec.kind!r}")
    decay = np.exp(-spec.gamma * distances_to(state.locations, new_location))
    return decay * spec.beta(state.fitness, state.degrees)


def node_weight(state, i: int, spec: KernelSpec, new_location=None) -> float:
    """Unnormalized attachment weight of node ``i`` under ``spec``.

    ``new_location`` must be supplied iff the kernel is spatial.
    """
    if spec.kind == SPATIAL:
        if new_location is None:
            raise ValueError("spatial kernel needs the incoming node's location")
        d = float(np.hypot(state.locations[i, 0] - new_location[0],
                           state.locations[i, 1] - new_location[1]))
        return float(np.exp(-spec.gamma * d) * spec.beta(state.fitness[i], state.degrees[i]))
    if new_location is not None:
        raise ValueError(f"new_location is only meaningful for the spatial kernel, not {spec.kind!r}")
    return float(attachment_weight(spec, state.fitness[i], state.degrees[i]))


@dataclass
class StepDecomposition:
    """Aggregate sums and per-node increments entering the one-step analysis.

    ``fitness_sum`` is the total fitness over current nodes, ``fitness_degree_sum``
    the total fitness-degree product, and ``g_sum`` the total weight under the
    kernel's own attachment function (so it equals the kernel's normalizer).
    """

    fitness_sum: float
    fitness_degree_sum: float
    g_sum: float
    _state: object = field(repr=False)
    _spec: KernelSpec = field(repr=False)

    def g_increment(self, i: int) -> float:
        """Change of node i's kernel weight if its degree rose by one."""
        f, d = self._state.fitness[i], self._state.degrees[i]
        return float(attachment_weight(self._spec, f, d + 1)
                     - attachment_weight(self._spec, f, d))

    def local_normalizer(self, k: int) -> float:
        """Total spatial weight an arrival at node k's location would see."""
        return float(np.sum(spatial_weights(self._state, self._spec, self._state.locations[k])))

    def h_increment(self, i: int, j: int) -> float:
        """Change of node i's spatial weight at node j's location for a degree bump."""
        s = self._state
        d = float(np.hypot(s.locations[i, 0] - s.locations[j, 0],
                           s.locations[i, 1] - s.locations[j, 1]))
        beta_up = self._spec.beta(s.fitness[i], s.degrees[i] + 1)
        beta_now = self._spec.beta(s.fitness[i], s.degrees[i])
        return float(np.exp(-self._spec.gamma * d) * (beta_up - beta_now))


def decomposition(state, spec: KernelSpec) -> StepDecomposition:
    """Compute the aggregate sums for the current state under ``spec``."""
    if state.time < 1:
        raise ValueError("decomposition needs a state at time >= 1")
    f = state.fitness
    d = state.degrees
    return StepDecomposition(
        fitness_sum=float(np.sum(f)),
        fitness_degree_sum=float(np.sum(f * d)),
        g_sum=float(np.sum(attachment_weight(spec, f, d))),
        _state=state,
        _spec=spec,
    )
