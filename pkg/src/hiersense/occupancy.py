"""Markov-modulated per-cell channel occupancy.

Each cell's occupancy is a two-state Markov chain, independent and
identically distributed across cells: an idle cell (0) becomes occupied
with probability ``p`` per slot, an occupied cell (1) frees up with
probability ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MarkovParams",
    "steady_state_probability",
    "step",
    "sample_steady_state",
    "simulate_states",
]


@dataclass(frozen=True)
class MarkovParams:
    """Per-slot transition probabilities of the occupancy chain.

    ``p`` is the idle-to-occupied probability, ``q`` the occupied-to-idle
    probability. ``p = q = 0`` is rejected: the chain would have no unique
    long-run occupancy level.
    """

    p: float
    q: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.p <= 1.0) or not (0.0 <= self.q <= 1.0):
            raise ValueError(
                f"transition probabilities must lie in [0, 1], got p={self.p}, q={self.q}"
            )
        if self.p + self.q == 0.0:
            raise ValueError("degenerate parameters: p = q = 0 leaves the steady state undefined")


def steady_state_probability(params: MarkovParams) -> float:
    """Long-run probability that a single cell is occupied, p / (p + q)."""
    return params.p / (params.p + params.q)


def _as_state(state) -> np.ndarray:
    bits = np.asarray(state, dtype=np.int8)
    if bits.ndim != 1:
        raise ValueError(f"state must be a 1-D 0/1 vector, got shape {bits.shape}")
    if not np.isin(bits, (0, 1)).all():
        raise ValueError("state entries must be 0 or 1")
    return bits


def step(state, params: MarkovParams, rng: np.random.Generator) -> np.ndarray:
    """Advance every cell one slot; cells evolve independently."""
    bits = _as_state(state)
    u = rng.random(bits.shape)
    # occupied survives w.p. 1-q, idle turns on w.p. p
    nxt = np.where(bits == 1, u >= params.q, u < params.p)
    return nxt.astype(np.int8)


def sample_steady_state(
    n_cells: int, params: MarkovParams, rng: np.random.Generator
) -> np.ndarray:
    """Draw each cell independently occupied with the steady-state probability."""
    if n_cells < 1:
        raise ValueError(f"n_cells must be >= 1, got {n_cells}")
    pi = steady_state_probability(params)
    return (rng.random(n_cells) < pi).astype(np.int8)


def simulate_states(
    n_slots: int,
    n_cells: int,
    params: MarkovParams,
    rng: np.random.Generator,
    init: np.ndarray | None = None,
    burn_in: int = 0,
) -> np.ndarray:
    """Simulate a (n_slots, n_cells) occupancy trajectory.

    The initial state is drawn from the steady state unless ``init`` is
    given, so long-run averages need no burn-in; ``burn_in`` extra leading
    slots can still be discarded for robustness experiments.
    """
    if n_slots < 1:
        raise ValueError(f"n_slots must be >= 1, got {n_slots}")
    state = sample_steady_state(n_cells, params, rng) if init is None else _as_state(init)
    if state.shape != (n_cells,):
        raise ValueError(f"init has {state.shape[0]} cells, expected {n_cells}")
    for _ in range(burn_in):
        state = step(state, params, rng)
    out = np.empty((n_slots, n_cells), dtype=np.int8)
    out[0] = state
    for t in range(1, n_slots):
        out[t] = step(out[t - 1], params, rng)
    return out
