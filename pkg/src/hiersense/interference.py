"""Grid geometry, random blockage walls, and the interference matrix.

Cells sit on a unit grid; cell ``i`` is centred at ``(i mod cols, i div cols)``.
Walls occupy interior edges shared by two adjacent cells. A pair of cells is
mutually blocked when the open sight line between their centres meets a wall,
so a single wall can block every collinear pair behind it, not just the two
cells it separates. An alternative "adjacent" semantics, where a wall blocks
only the pair it separates, is kept for sensitivity runs.

All blockage tests run in doubled integer coordinates (centres even, wall
endpoints odd), so the segment-intersection predicate is exact: no epsilon,
no float rounding. A sight line can graze a wall only at the wall's endpoint,
never at a cell centre, and such grazing counts as blocked.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridTopology",
    "BlockageLayout",
    "sample_blockage",
    "is_blocked",
    "blocked_matrix",
    "build_interference_matrix",
    "format_layout",
    "parse_layout",
]

Cell = tuple[int, int]  # (row, col)
Wall = tuple[Cell, Cell]


@dataclass(frozen=True)
class GridTopology:
    """Rectangular cell grid with unit spacing."""

    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")

    @property
    def n_cells(self) -> int:
        return self.rows * self.cols

    def cell_index(self, row: int, col: int) -> int:
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise ValueError(f"cell ({row}, {col}) outside {self.rows}x{self.cols} grid")
        return row * self.cols + col

    def positions(self) -> np.ndarray:
        """(n_cells, 2) array of (x, y) centres; x = col, y = row."""
        idx = np.arange(self.n_cells)
        return np.stack([idx % self.cols, idx // self.cols], axis=1).astype(float)

    def interior_edges(self) -> list[Wall]:
        """All shared boundaries between adjacent cells, in a fixed order."""
        edges: list[Wall] = []
        for r in range(self.rows):
            for c in range(self.cols - 1):
                edges.append(((r, c), (r, c + 1)))
        for r in range(self.rows - 1):
            for c in range(self.cols):
                edges.append(((r, c), (r + 1, c)))
        return edges


def _normalize_wall(wall: Wall) -> Wall:
    a, b = wall
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class BlockageLayout:
    """A set of walls, each identified by the adjacent cell pair it separates."""

    walls: frozenset[Wall]

    def __post_init__(self) -> None:
        object.__setattr__(self, "walls", frozenset(_normalize_wall(w) for w in self.walls))

    def sorted_walls(self) -> list[Wall]:
        return sorted(self.walls)


def _check_layout(topology: GridTopology, layout: BlockageLayout) -> None:
    valid = set(topology.interior_edges())
    bad = layout.walls - valid
    if bad:
        raise ValueError(f"walls not on interior edges of the grid: {sorted(bad)}")


def sample_blockage(
    topology: GridTopology, p_block: float, rng: np.random.Generator
) -> BlockageLayout:
    """Drop a wall on each interior edge independently with probability p_block."""
    if not 0.0 <= p_block <= 1.0:
        raise ValueError(f"p_block must lie in [0, 1], got {p_block}")
    edges = topology.interior_edges()
    keep = rng.random(len(edges)) < p_block
    return BlockageLayout(frozenset(e for e, k in zip(edges, keep) if k))


def _wall_segments(layout: BlockageLayout) -> np.ndarray:
    """(n_walls, 2, 2) wall endpoints in doubled integer coordinates."""
    segs = []
    for (r1, c1), (r2, c2) in layout.sorted_walls():
        if r1 == r2:  # horizontal neighbours -> vertical wall at x = c1 + 1/2
            segs.append(((2 * c1 + 1, 2 * r1 - 1), (2 * c1 + 1, 2 * r1 + 1)))
        else:  # vertical neighbours -> horizontal wall at y = r1 + 1/2
            segs.append(((2 * c1 - 1, 2 * r1 + 1), (2 * c1 + 1, 2 * r1 + 1)))
    return np.asarray(segs, dtype=np.int64).reshape(-1, 2, 2)


def _sight_blocked(a1: np.ndarray, a2: np.ndarray, walls: np.ndarray) -> np.ndarray:
    """Exact test of open sight segments (a1->a2) against closed wall segments.

    a1, a2: (P, 2) doubled cell-centre coordinates (even integers).
    walls: (W, 2, 2) doubled wall endpoints (odd coordinates on the wall axis).
    Returns a (P,) boolean: sight line crossed by at least one wall.

    Centres can never lie on a wall (even vs. odd parity), so the only cases
    are a proper crossing or a wall endpoint sitting on the open sight line.
    """
    n_pairs = a1.shape[0]
    if walls.shape[0] == 0 or n_pairs == 0:
        return np.zeros(n_pairs, dtype=bool)
    w1 = walls[:, 0][None, :, :]  # (1, W, 2)
    w2 = walls[:, 1][None, :, :]
    p1 = a1[:, None, :]  # (P, 1, 2)
    p2 = a2[:, None, :]

    def cross(u, v):
        return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

    dw = w2 - w1
    da = p2 - p1
    d1 = cross(dw, p1 - w1)  # side of a1 w.r.t. wall line; never 0 by parity
    d2 = cross(dw, p2 - w1)
    d3 = cross(da, w1 - p1)  # side of wall endpoints w.r.t. sight line
    d4 = cross(da, w2 - p1)

    proper = (d1 * d2 < 0) & (d3 * d4 < 0)

    lo = np.minimum(p1, p2)
    hi = np.maximum(p1, p2)

    def endpoint_on_sight(w, d):
        inside = (lo <= w).all(axis=-1) & (w <= hi).all(axis=-1)
        return (d == 0) & inside

    graze = endpoint_on_sight(w1, d3) | endpoint_on_sight(w2, d4)
    return (proper | graze).any(axis=1)


def is_blocked(
    i: int, j: int, topology: GridTopology, layout: BlockageLayout
) -> bool:
    """True when the open sight line between cells i and j crosses a wall."""
    if i == j:
        raise ValueError("blockage between a cell and itself is undefined")
    _check_layout(topology, layout)
    pos = topology.positions()
    a1 = (2 * pos[[i]]).astype(np.int64)
    a2 = (2 * pos[[j]]).astype(np.int64)
    return bool(_sight_blocked(a1, a2, _wall_segments(layout))[0])


def blocked_matrix(
    topology: GridTopology, layout: BlockageLayout, semantics: str = "los"
) -> np.ndarray:
    """Symmetric boolean matrix of blocked pairs (diagonal stays False).

    semantics="los": sight-line test, one wall can block many collinear pairs.
    semantics="adjacent": a wall blocks only the adjacent pair it separates.
    """
    _check_layout(topology, layout)
    n = topology.n_cells
    blocked = np.zeros((n, n), dtype=bool)
    if semantics == "adjacent":
        for (r1, c1), (r2, c2) in layout.walls:
            a, b = topology.cell_index(r1, c1), topology.cell_index(r2, c2)
            blocked[a, b] = blocked[b, a] = True
        return blocked
    if semantics != "los":
        raise ValueError(f"unknown blockage semantics: {semantics!r}")
    walls = _wall_segments(layout)
    if walls.shape[0] == 0:
        return blocked
    ii, jj = np.triu_indices(n, k=1)
    centers = (2 * topology.positions()).astype(np.int64)
    hit = _sight_blocked(centers[ii], centers[jj], walls)
    blocked[ii, jj] = hit
    blocked[jj, ii] = hit
    return blocked


def build_interference_matrix(
    topology: GridTopology,
    layout: BlockageLayout,
    alpha: float,
    semantics: str = "los",
) -> np.ndarray:
    """Power-law interference strengths with blocked pairs zeroed.

    Unblocked pairs get distance**(-alpha); the diagonal is 1 and never
    blocked (a cell has no sight line to itself to interrupt).
    """
    if alpha <= 0:
        raise ValueError(f"pathloss exponent must be positive, got {alpha}")
    pos = topology.positions()
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    with np.errstate(divide="ignore"):
        phi = np.where(dist > 0, dist ** (-alpha), 1.0)
    phi[blocked_matrix(topology, layout, semantics)] = 0.0
    return phi


def format_layout(layout: BlockageLayout) -> str:
    """One wall per line as an ((r1,c1),(r2,c2)) cell pair; stable order."""
    return "\n".join(f"(({r1},{c1}),({r2},{c2}))" for (r1, c1), (r2, c2) in layout.sorted_walls())


def parse_layout(text: str, topology: GridTopology | None = None) -> BlockageLayout:
    """Inverse of :func:`format_layout`; blank lines and # comments ignored."""
    walls: list[Wall] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            pair = ast.literal_eval(line)
            (r1, c1), (r2, c2) = pair
            wall = ((int(r1), int(c1)), (int(r2), int(c2)))
        except (ValueError, SyntaxError, TypeError) as exc:
            raise ValueError(f"line {lineno}: expected ((r1,c1),(r2,c2)), got {raw!r}") from exc
        walls.append(wall)
    layout = BlockageLayout(frozenset(walls))
    if topology is not None:
        _check_layout(topology, layout)
    return layout
