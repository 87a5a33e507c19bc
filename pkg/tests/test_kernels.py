import numpy as np
import pytest

from netgrowth import (FitnessDistribution, GraphState, KernelSpec, RngStream,
                       decomposition, grow_step, new_seed_graph, node_weight,
                       visibility_nonspatial)
from netgrowth.kernels import (AF, BA, GF, MF, SPATIAL, attachment_weight,
                               node_weights, spatial_weights)


def path_graph(fitness=(1.0, 1.0, 1.0)):
    locs = np.array([[0.1, 0.1], [0.5, 0.5], [0.9, 0.9]])
    return GraphState(2, [1, 2, 1], fitness, locs)


def random_graph(seed, t, kind=MF, gamma=1.0):
    kernel = KernelSpec(kind=kind, gamma=gamma)
    dist = FitnessDistribution(2.0)
    rng = RngStream(seed).generator()
    state = new_seed_graph(kernel, dist, rng)
    while state.time < t:
        grow_step(state, kernel, dist, rng)
    return state


def test_node_weight_worked_values():
    state = path_graph(fitness=(1.0, 4.0, 1.0))
    assert node_weight(state, 1, KernelSpec(kind=MF)) == 8.0          # 4 * 2
    assert node_weight(state, 1, KernelSpec(kind=AF)) == 6.0          # 4 + 2
    assert node_weight(state, 1, KernelSpec(kind=BA)) == 2.0
    quad = path_graph()
    assert node_weight(quad, 1, KernelSpec(kind=GF)) == 4.0           # (1*2)**2


def test_node_weight_spatial_gamma_zero_collapses():
    state = path_graph(fitness=(2.0, 3.0, 1.5))
    spatial = KernelSpec(kind=SPATIAL, gamma=0.0)
    mf = KernelSpec(kind=MF)
    for i in range(3):
        assert node_weight(state, i, spatial, new_location=(0.3, 0.7)) == \
            node_weight(state, i, mf)


def test_node_weight_location_argument_rules():
    state = path_graph()
    with pytest.raises(ValueError, match="location"):
        node_weight(state, 0, KernelSpec(kind=SPATIAL, gamma=1.0))
    with pytest.raises(ValueError, match="spatial"):
        node_weight(state, 0, KernelSpec(kind=BA), new_location=(0.5, 0.5))


def test_kernel_spec_validation():
    with pytest.raises(ValueError, match="kind"):
        KernelSpec(kind="bogus").validate()
    with pytest.raises(ValueError, match="gamma"):
        KernelSpec(kind=SPATIAL, gamma=-1.0).validate()


def test_decomposition_worked_sums():
    state = path_graph(fitness=(1.0, 4.0, 1.0))
    dec = decomposition(state, KernelSpec(kind=MF))
    assert dec.fitness_degree_sum == 10.0        # 1*1 + 4*2 + 1*1
    assert dec.fitness_sum == 6.0
    quad = decomposition(state, KernelSpec(kind=GF))
    assert quad.g_sum == 66.0                    # (1*1)**2 + (4*2)**2 + (1*1)**2


def test_decomposition_mf_increment_is_fitness():
    state = random_graph(5, 60)
    dec = decomposition(state, KernelSpec(kind=MF))
    for i in range(state.node_count):
        assert dec.g_increment(i) == pytest.approx(state.fitness[i], rel=1e-12)


def test_decomposition_ba_af_increment_is_one():
    state = random_graph(6, 40)
    for kind in (BA, AF):
        dec = decomposition(state, KernelSpec(kind=kind))
        for i in range(state.node_count):
            assert dec.g_increment(i) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("kind,gamma", [(BA, 0.0), (AF, 0.0), (MF, 0.0),
                                        (GF, 0.0), (SPATIAL, 1.5)])
def test_decomposition_matches_node_weight_fold(kind, gamma):
    state = random_graph(7, 300, kind=kind if kind != SPATIAL else SPATIAL, gamma=gamma)
    spec = KernelSpec(kind=kind, gamma=gamma)
    dec = decomposition(state, spec)
    fold_fit = sum(float(f) for f in state.fitness)
    assert abs(dec.fitness_sum - fold_fit) <= 1e-12 * fold_fit
    if kind == SPATIAL:
        for k in (0, state.node_count // 2, state.node_count - 1):
            fold = sum(node_weight(state, i, spec, new_location=state.locations[k])
                       for i in range(state.node_count))
            assert abs(dec.local_normalizer(k) - fold) <= 1e-12 * fold
    else:
        fold = sum(node_weight(state, i, spec) for i in range(state.node_count))
        assert abs(dec.g_sum - fold) <= 1e-12 * fold


def test_decomposition_fold_large_graph():
    state = random_graph(8, 10_000)
    spec = KernelSpec(kind=MF)
    dec = decomposition(state, spec)
    fold = sum(node_weight(state, i, spec) for i in range(state.node_count))
    assert abs(dec.g_sum - fold) <= 1e-12 * fold
    assert dec.g_sum == dec.fitness_degree_sum


def test_decomposition_sums_monotone():
    kernel = KernelSpec(kind=MF)
    dist = FitnessDistribution(2.0)
    rng = RngStream(9).generator()
    state = new_seed_graph(kernel, dist, rng)
    prev = decomposition(state, kernel)
    for _ in range(50):
        grow_step(state, kernel, dist, rng)
        cur = decomposition(state, kernel)
        assert cur.fitness_sum > prev.fitness_sum
        assert cur.fitness_degree_sum > prev.fitness_degree_sum
        assert cur.g_sum > prev.g_sum
        prev = cur


def test_spatial_h_increment():
    state = path_graph(fitness=(1.0, 4.0, 1.0))
    spec = KernelSpec(kind=SPATIAL, gamma=2.0)
    dec = decomposition(state, spec)
    d01 = np.hypot(0.4, 0.4)
    # multiplicative beta: bumping node 0's degree adds fitness[0], decayed over d(0,1)
    assert dec.h_increment(0, 1) == pytest.approx(np.exp(-2.0 * d01) * 1.0, rel=1e-12)
    assert dec.h_increment(1, 1) == pytest.approx(4.0, rel=1e-12)


def test_constant_fitness_mf_equals_ba_law():
    state = random_graph(10, 80, kind=BA)
    flat = GraphState(state.time, state.degrees, np.full(state.node_count, 2.5),
                      state.locations)
    ba = visibility_nonspatial(flat, KernelSpec(kind=BA)).values
    mf = visibility_nonspatial(flat, KernelSpec(kind=MF)).values
    w_ba = node_weights(flat, KernelSpec(kind=BA))
    w_mf = node_weights(flat, KernelSpec(kind=MF))
    assert np.array_equal(w_mf, 2.5 * w_ba)
    assert np.argmax(ba) == np.argmax(mf)
    assert np.allclose(ba, mf, rtol=1e-13, atol=0)


def test_gamma_zero_spatial_weights_equal_mf():
    state = random_graph(11, 120)
    w_mf = node_weights(state, KernelSpec(kind=MF))
    w_sp = spatial_weights(state, KernelSpec(kind=SPATIAL, gamma=0.0), (0.42, 0.17))
    assert np.array_equal(w_mf, w_sp)


@pytest.mark.parametrize("kind,gamma", [(BA, 0.0), (AF, 0.0), (MF, 0.0),
                                        (GF, 0.0), (SPATIAL, 3.0)])
def test_weights_strictly_positive(kind, gamma):
    state = random_graph(12, 150, kind=kind, gamma=gamma)
    spec = KernelSpec(kind=kind, gamma=gamma)
    if kind == SPATIAL:
        w = spatial_weights(state, spec, (0.5, 0.5))
    else:
        w = node_weights(state, spec)
    assert np.all(w > 0)


def test_attachment_weight_vectorized_matches_scalar():
    state = random_graph(13, 50)
    for kind in (BA, AF, MF, GF):
        spec = KernelSpec(kind=kind)
        vec = attachment_weight(spec, state.fitness, state.degrees)
        for i in range(state.node_count):
            assert vec[i] == attachment_weight(spec, state.fitness[i], state.degrees[i])


def test_node_weights_rejects_spatial():
    with pytest.raises(ValueError, match="spatial"):
        node_weights(path_graph(), KernelSpec(kind=SPATIAL, gamma=1.0))
