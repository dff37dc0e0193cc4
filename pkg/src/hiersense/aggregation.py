"""Per-slot information exchange: fuse occupancy counts up the tree, then
recover each cell's multi-scale observation vector on the way back down.

A cell's observation vector has one entry per hierarchical distance: entry 0
is its own occupancy, entry L is the occupied count among the cells at
distance exactly L, obtained by subtracting the level-(L-1) aggregate from the
level-L aggregate it receives.
"""

from __future__ import annotations

import numpy as np

from .hierarchy import AggregationTree

__all__ = ["aggregate_up", "observe", "observe_all", "observe_states"]


def aggregate_up(tree: AggregationTree, state: np.ndarray) -> list[np.ndarray]:
    """Fuse occupancy sums level by level; sums[L][k] covers cluster k at level L."""
    bits = np.asarray(state)
    if bits.shape != (tree.n_cells,):
        raise ValueError(f"state has shape {bits.shape}, expected ({tree.n_cells},)")
    sums = [bits.astype(np.int64)]
    for lvl in range(1, tree.depth + 1):
        heads = np.array(
            [tree.parents[lvl, cluster[0]] for cluster in tree.levels[lvl - 1]], dtype=np.int64
        )
        fused = np.zeros(len(tree.levels[lvl]), dtype=np.int64)
        np.add.at(fused, heads, sums[lvl - 1])
        sums.append(fused)
    return sums


def observe(tree: AggregationTree, sums: list[np.ndarray], cell: int) -> np.ndarray:
    """Observation vector for one cell from the fused per-level sums."""
    if not 0 <= cell < tree.n_cells:
        raise ValueError(f"cell {cell} out of range for {tree.n_cells} cells")
    obs = np.empty(tree.depth + 1, dtype=np.int64)
    obs[0] = sums[0][cell]
    for lvl in range(1, tree.depth + 1):
        obs[lvl] = sums[lvl][tree.parents[lvl, cell]] - sums[lvl - 1][tree.parents[lvl - 1, cell]]
    return obs


def observe_all(tree: AggregationTree, sums: list[np.ndarray]) -> np.ndarray:
    """(n_cells, depth+1) observation matrix for every cell at once."""
    n, depth = tree.n_cells, tree.depth
    obs = np.empty((n, depth + 1), dtype=np.int64)
    obs[:, 0] = sums[0]
    for lvl in range(1, depth + 1):
        obs[:, lvl] = sums[lvl][tree.parents[lvl]] - sums[lvl - 1][tree.parents[lvl - 1]]
    return obs


def observe_states(tree: AggregationTree, states: np.ndarray) -> np.ndarray:
    """Observation tensor (n_slots, n_cells, depth+1) for a batch of slots.

    Same protocol as aggregate_up/observe, vectorised across slots for
    long simulations; counts come back as exact small integers in floats.
    """
    states = np.asarray(states, dtype=float)
    if states.ndim != 2 or states.shape[1] != tree.n_cells:
        raise ValueError(f"states must be (n_slots, {tree.n_cells}), got {states.shape}")
    n_slots, n = states.shape
    obs = np.empty((n_slots, n, tree.depth + 1))
    obs[:, :, 0] = states
    prev_by_cell = states  # level-(L-1) aggregate seen by each cell
    for lvl in range(1, tree.depth + 1):
        k = len(tree.levels[lvl])
        member = np.zeros((n, k))
        member[np.arange(n), tree.parents[lvl]] = 1.0
        level_sums = states @ member  # (n_slots, k)
        by_cell = level_sums[:, tree.parents[lvl]]
        obs[:, :, lvl] = by_cell - prev_by_cell
        prev_by_cell = by_cell
    return obs
