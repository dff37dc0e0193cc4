import numpy as np
import pytest

from hiersense.aggregation import aggregate_up, observe, observe_all, observe_states
from hiersense.hierarchy import build_greedy_tree, build_regular_tree
from hiersense.interference import BlockageLayout, GridTopology, build_interference_matrix
from hiersense.occupancy import MarkovParams, sample_steady_state
from hiersense.oracles import random_tree


def grid_tree(rows, cols):
    return build_regular_tree(GridTopology(rows, cols))


def test_aggregate_up_constant_states():
    tree = grid_tree(4, 4)
    sums = aggregate_up(tree, np.zeros(16, dtype=np.int8))
    assert all((s == 0).all() for s in sums)
    sums = aggregate_up(tree, np.ones(16, dtype=np.int8))
    for lvl, level_sums in enumerate(sums):
        expected = [len(c) for c in tree.levels[lvl]]
        assert level_sums.tolist() == expected


def test_aggregate_up_matches_direct_sums(rng):
    for _ in range(10):
        tree = random_tree(int(rng.integers(2, 12)), int(rng.integers(1, 4)), rng)
        state = (rng.random(tree.n_cells) < 0.5).astype(np.int8)
        sums = aggregate_up(tree, state)
        for lvl, clusters in enumerate(tree.levels):
            for k, cluster in enumerate(clusters):
                assert sums[lvl][k] == state[list(cluster)].sum()
        assert sums[-1][0] == state.sum()


def test_aggregate_up_shape_check():
    with pytest.raises(ValueError):
        aggregate_up(grid_tree(2, 2), np.zeros(5))


def test_observe_two_cell_example():
    tree = grid_tree(1, 2)
    sums = aggregate_up(tree, np.array([1, 0], dtype=np.int8))
    assert observe(tree, sums, 0).tolist() == [1, 0]
    assert observe(tree, sums, 1).tolist() == [0, 1]
    with pytest.raises(ValueError):
        observe(tree, sums, 2)


def test_observation_equals_distance_class_sums(rng):
    # subtraction form vs direct per-class summation
    from hiersense.hierarchy import build_distance_index

    for _ in range(10):
        n = int(rng.integers(2, 12))
        tree = random_tree(n, int(rng.integers(1, 4)), rng)
        index = build_distance_index(tree, np.eye(n))
        state = (rng.random(n) < 0.4).astype(np.int8)
        sums = aggregate_up(tree, state)
        for cell in range(n):
            obs = observe(tree, sums, cell)
            direct = [
                state[list(members)].sum() if members else 0
                for members in index.classes[cell]
            ]
            assert obs.tolist() == direct
            assert 0 <= obs.min()
            assert (obs <= index.sizes[cell]).all()


def test_observation_conservation(rng):
    tree = grid_tree(4, 4)
    params = MarkovParams(0.2, 0.3)
    for _ in range(5):
        state = sample_steady_state(16, params, rng)
        sums = aggregate_up(tree, state)
        all_obs = observe_all(tree, sums)
        totals = all_obs.sum(axis=1)
        assert (totals == state.sum()).all()
        assert (totals == sums[-1][0]).all()


def test_observe_all_matches_observe(rng):
    tree = build_greedy_tree(
        build_interference_matrix(GridTopology(3, 3), BlockageLayout(frozenset()), 2.0)
    )
    state = (rng.random(9) < 0.5).astype(np.int8)
    sums = aggregate_up(tree, state)
    all_obs = observe_all(tree, sums)
    for cell in range(9):
        assert (all_obs[cell] == observe(tree, sums, cell)).all()


def test_observe_states_batch_matches_slotwise(rng):
    tree = grid_tree(2, 3)
    states = (rng.random((40, 6)) < 0.5).astype(np.int8)
    batch = observe_states(tree, states)
    assert batch.shape == (40, 6, tree.depth + 1)
    for t in range(40):
        sums = aggregate_up(tree, states[t])
        assert (batch[t] == observe_all(tree, sums)).all()
    with pytest.raises(ValueError):
        observe_states(tree, states[:, :5])
