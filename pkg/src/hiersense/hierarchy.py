"""Aggregation-tree construction and hierarchical-distance bookkeeping.

A tree is a sequence of levels; level 0 holds singleton clusters, each later
level partitions the cells into unions of the previous level's clusters, and
the top level is the single all-cell cluster. Two builders are provided: a
grid-regular pairing that ignores interference, and a greedy agglomerative
pairing that repeatedly merges the two clusters with the largest inter-cluster
interference sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .interference import GridTopology

__all__ = [
    "AggregationTree",
    "DistanceClassIndex",
    "build_regular_tree",
    "build_greedy_tree",
    "similarity",
    "hierarchical_distance",
    "build_distance_index",
    "format_tree",
    "validate_tree",
]

Cluster = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class AggregationTree:
    """Cluster hierarchy over cells 0..n_cells-1.

    levels[L][k] is the sorted cell tuple of cluster k at level L;
    parents[L, i] is the index of the level-L cluster containing cell i.
    """

    levels: tuple[tuple[Cluster, ...], ...]
    parents: np.ndarray

    @property
    def n_cells(self) -> int:
        return len(self.levels[0])

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def cluster_counts(self) -> list[int]:
        return [len(lvl) for lvl in self.levels]


def _make_tree(levels: list[list[Cluster]]) -> AggregationTree:
    n = len(levels[0])
    parents = np.empty((len(levels), n), dtype=np.int64)
    for lvl, clusters in enumerate(levels):
        for k, cluster in enumerate(clusters):
            for i in cluster:
                parents[lvl, i] = k
    frozen = tuple(tuple(tuple(sorted(c)) for c in clusters) for clusters in levels)
    return AggregationTree(levels=frozen, parents=parents)


def validate_tree(tree: AggregationTree) -> None:
    """Raise if any structural invariant is violated."""
    n = tree.n_cells
    cells = set(range(n))
    if tree.levels[0] != tuple((i,) for i in range(n)):
        raise ValueError("level 0 must be the singleton clusters in cell order")
    if len(tree.levels[-1]) != 1 or set(tree.levels[-1][0]) != cells:
        raise ValueError("top level must be a single cluster holding every cell")
    for lvl, clusters in enumerate(tree.levels):
        seen: set[int] = set()
        for cluster in clusters:
            if seen & set(cluster):
                raise ValueError(f"level {lvl} clusters overlap")
            seen |= set(cluster)
        if seen != cells:
            raise ValueError(f"level {lvl} clusters do not cover every cell")
        if lvl > 0:
            prev = {c: k for k, cluster in enumerate(tree.levels[lvl - 1]) for c in cluster}
            for cluster in clusters:
                child_ids = {prev[c] for c in cluster}
                merged = sorted(c for k in child_ids for c in tree.levels[lvl - 1][k])
                if tuple(merged) != cluster:
                    raise ValueError(f"level {lvl} cluster is not a union of level-{lvl - 1} clusters")


def build_regular_tree(topology: GridTopology, pairing: str = "scan") -> AggregationTree:
    """Interference-agnostic baseline: pair neighbouring cells, then clusters, in order.

    pairing="scan" (default) pairs consecutive clusters in cell-index order at
    every level, so level 1 joins columns 2c and 2c+1 within each row and
    higher levels keep concatenating along the row-major order; an odd
    leftover is carried up alone. pairing="axes" is a variant that alternates
    pairing direction per level (columns at level 1, rows at level 2, ...),
    which yields square blocks instead of row-shaped ones. Both ignore
    interference entirely.
    """
    if pairing == "scan":
        clusters: list[Cluster] = [(i,) for i in range(topology.n_cells)]
        levels: list[list[Cluster]] = [list(clusters)]
        while len(clusters) > 1:
            merged = [
                tuple(sorted(clusters[k] + clusters[k + 1]))
                for k in range(0, len(clusters) - 1, 2)
            ]
            if len(clusters) % 2:
                merged.append(clusters[-1])
            clusters = merged
            levels.append(list(clusters))
        return _make_tree(levels)
    if pairing != "axes":
        raise ValueError(f"unknown pairing scheme: {pairing!r}")
    blocks: list[list[Cluster]] = [
        [(topology.cell_index(r, c),) for c in range(topology.cols)]
        for r in range(topology.rows)
    ]
    levels = [[blk for row in blocks for blk in row]]
    prefer_horizontal = True
    while len(blocks) * len(blocks[0]) > 1:
        n_rows, n_cols = len(blocks), len(blocks[0])
        pair_cols = (prefer_horizontal and n_cols > 1) or n_rows == 1
        if pair_cols:
            blocks = [
                [
                    tuple(sorted(row[2 * c] + (row[2 * c + 1] if 2 * c + 1 < n_cols else ())))
                    for c in range((n_cols + 1) // 2)
                ]
                for row in blocks
            ]
        else:
            blocks = [
                [
                    tuple(
                        sorted(
                            blocks[2 * r][c]
                            + (blocks[2 * r + 1][c] if 2 * r + 1 < n_rows else ())
                        )
                    )
                    for c in range(n_cols)
                ]
                for r in range((n_rows + 1) // 2)
            ]
        levels.append([blk for row in blocks for blk in row])
        prefer_horizontal = not prefer_horizontal
    return _make_tree(levels)


def similarity(k1, k2, phi: np.ndarray) -> float:
    """Sum of interference strengths across two disjoint cell groups."""
    a, b = sorted(set(k1)), sorted(set(k2))
    if set(a) & set(b):
        raise ValueError(f"clusters overlap: {sorted(set(a) & set(b))}")
    return float(np.asarray(phi)[np.ix_(a, b)].sum())


def _check_phi(phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
        raise ValueError(f"interference matrix must be square, got shape {phi.shape}")
    if not np.array_equal(phi, phi.T):
        raise ValueError("interference matrix must be symmetric")
    if (phi < 0).any():
        raise ValueError("interference strengths must be nonnegative")
    return phi


def build_greedy_tree(
    phi: np.ndarray,
    tie_break: str = "lex",
    rng: np.random.Generator | None = None,
) -> AggregationTree:
    """Agglomerative pairing: merge the most-interfering unpaired clusters first.

    At each level, repeatedly extract the unpaired cluster pair with the
    largest inter-cluster interference sum; an odd leftover cluster is carried
    up alone. Ties go to the lexicographically smallest cluster-id pair
    (``tie_break="lex"``, the default) or to a uniformly random maximiser
    (``tie_break="random"``, requires ``rng``) for sensitivity runs.
    """
    phi = _check_phi(phi)
    if tie_break not in ("lex", "random"):
        raise ValueError(f"unknown tie_break policy: {tie_break!r}")
    if tie_break == "random" and rng is None:
        raise ValueError("tie_break='random' needs an rng")
    n = phi.shape[0]
    clusters: list[Cluster] = [(i,) for i in range(n)]
    levels: list[list[Cluster]] = [list(clusters)]
    gamma = phi.copy()
    while len(clusters) > 1:
        k = len(clusters)
        work = gamma.copy()
        work[np.tril_indices(k)] = -np.inf  # one entry per unordered pair
        order: list[tuple[int, ...]] = []
        remaining = k
        while remaining > 1:
            if tie_break == "lex":
                flat = int(np.argmax(work))  # row-major argmax = smallest (i, j) tie-break
            else:
                top = work.max()
                cand = np.argwhere(work == top)
                pick = cand[rng.integers(len(cand))]
                flat = int(pick[0] * k + pick[1])
            i, j = divmod(flat, k)
            order.append((i, j))
            work[i, :] = work[:, i] = -np.inf
            work[j, :] = work[:, j] = -np.inf
            remaining -= 2
        if remaining == 1:
            paired = {c for pair in order for c in pair}
            leftover = next(c for c in range(k) if c not in paired)
            order.append((leftover,))
        merge = np.zeros((len(order), k))
        new_clusters: list[Cluster] = []
        for new_id, group in enumerate(order):
            merged: tuple[int, ...] = ()
            for c in group:
                merged += clusters[c]
                merge[new_id, c] = 1.0
            new_clusters.append(tuple(sorted(merged)))
        gamma = merge @ gamma @ merge.T
        clusters = new_clusters
        levels.append(list(clusters))
    return _make_tree(levels)


def hierarchical_distance(tree: AggregationTree, i: int, j: int) -> int:
    """Smallest level at which cells i and j share a cluster."""
    n = tree.n_cells
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"cell indices out of range for {n} cells: ({i}, {j})")
    for lvl in range(tree.depth + 1):
        if tree.parents[lvl, i] == tree.parents[lvl, j]:
            return lvl
    raise AssertionError("tree has no common root")  # unreachable on a valid tree


@dataclass(frozen=True, eq=False)
class DistanceClassIndex:
    """Per-cell distance classes with their sizes and interference sums.

    classes[i][L] holds the cells at hierarchical distance exactly L from
    cell i; sizes and phi_sums are (n_cells, depth+1) arrays, and weights is
    phi_sums / sizes with empty classes contributing 0.
    """

    classes: tuple[tuple[Cluster, ...], ...]
    sizes: np.ndarray
    phi_sums: np.ndarray
    weights: np.ndarray

    @property
    def n_cells(self) -> int:
        return len(self.classes)

    @property
    def depth(self) -> int:
        return self.sizes.shape[1] - 1


def build_distance_index(tree: AggregationTree, phi: np.ndarray) -> DistanceClassIndex:
    """Precompute every cell's distance classes over the given interference matrix."""
    phi = np.asarray(phi, dtype=float)
    n = tree.n_cells
    if phi.shape != (n, n):
        raise ValueError(f"interference matrix shape {phi.shape} does not match {n} cells")
    depth = tree.depth
    classes: list[tuple[Cluster, ...]] = []
    sizes = np.zeros((n, depth + 1), dtype=np.int64)
    sums = np.zeros((n, depth + 1), dtype=float)
    for i in range(n):
        per_cell: list[Cluster] = [(i,)]
        for lvl in range(1, depth + 1):
            own = set(tree.levels[lvl][tree.parents[lvl, i]])
            inner = set(tree.levels[lvl - 1][tree.parents[lvl - 1, i]])
            per_cell.append(tuple(sorted(own - inner)))
        classes.append(tuple(per_cell))
        for lvl, members in enumerate(per_cell):
            sizes[i, lvl] = len(members)
            sums[i, lvl] = phi[i, list(members)].sum() if members else 0.0
    weights = np.divide(sums, sizes, out=np.zeros_like(sums), where=sizes > 0)
    return DistanceClassIndex(
        classes=tuple(classes), sizes=sizes, phi_sums=sums, weights=weights
    )


def format_tree(tree: AggregationTree) -> str:
    """One line per level, clusters rendered as sorted cell-index sets."""
    lines = []
    for lvl, clusters in enumerate(tree.levels):
        rendered = " ".join("{" + ",".join(str(c) for c in cluster) + "}" for cluster in clusters)
        lines.append(f"level {lvl}: {rendered}")
    return "\n".join(lines)


def expected_depth(n_cells: int) -> int:
    """Depth of any ceil-halving pairing scheme: ceil(log2 n) for n >= 2."""
    return 0 if n_cells <= 1 else math.ceil(math.log2(n_cells))
