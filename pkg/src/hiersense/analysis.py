"""Exact long-run performance evaluation.

At steady state the occupied count of every distance class is an independent
binomial, so the long-run average of the optimal expected network reward is a
finite nested sum per cell: enumerate the per-class counts, weight by their
binomial probabilities, and clip the transmit reward at zero. The
full-information benchmark replaces class counts with the exact state, either
by enumerating all states (small networks) or by Monte Carlo sampling.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import stats

from .decision import RewardParams
from .hierarchy import DistanceClassIndex

__all__ = [
    "EnumerationLimitError",
    "closed_form_average_reward",
    "full_info_upper_bound_exact",
    "full_info_upper_bound_mc",
]

DEFAULT_TERM_CAP = 10_000_000
DEFAULT_ENUM_CELLS = 20


class EnumerationLimitError(ValueError):
    """An exact evaluation would exceed its enumeration budget."""


def _check_prob(value: float, name: str) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return float(value)


def closed_form_average_reward(
    index: DistanceClassIndex,
    params: RewardParams,
    occupancy_prob: float,
    max_terms_per_cell: int = DEFAULT_TERM_CAP,
) -> float:
    """Exact long-run average network reward for a tree's distance-class index.

    Cost per cell is the product of (class size + 1) over its classes; when
    that exceeds ``max_terms_per_cell`` an :class:`EnumerationLimitError` is
    raised and callers should fall back to the slot-simulation / Monte Carlo
    path instead.
    """
    pi = _check_prob(occupancy_prob, "occupancy_prob")
    lam = params.interference_weight
    total = 0.0
    for cell in range(index.n_cells):
        sizes = index.sizes[cell]
        n_terms = math.prod(int(s) + 1 for s in sizes)
        if n_terms > max_terms_per_cell:
            raise EnumerationLimitError(
                f"cell {cell} needs {n_terms} closed-form terms (cap {max_terms_per_cell}); "
                "use the Monte Carlo / slot-simulation path for this tree"
            )
        # joint distribution of the interference penalty over classes >= 1
        penalties = np.zeros(1)
        probs = np.ones(1)
        for lvl in range(1, index.depth + 1):
            n = int(sizes[lvl])
            if n == 0:
                continue
            counts = np.arange(n + 1)
            pmf = stats.binom.pmf(counts, n, pi)
            contrib = lam * index.weights[cell, lvl] * counts
            penalties = (penalties[:, None] + contrib[None, :]).ravel()
            probs = (probs[:, None] * pmf[None, :]).ravel()
        self_penalty = lam * index.phi_sums[cell, 0]
        for own, p_own in ((0, 1.0 - pi), (1, pi)):
            base = params.rho_idle * (1 - own) + params.rho_busy * own - self_penalty * own
            total += p_own * float(probs @ np.maximum(base - penalties, 0.0))
    return total


@lru_cache(maxsize=8)
def _state_table(n_cells: int) -> np.ndarray:
    """(2**n, n) matrix of all binary states; row s is the base-2 digits of s."""
    codes = np.arange(2**n_cells, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n_cells)[None, :]) & 1
    table = bits.astype(float)
    table.setflags(write=False)
    return table


def _transmit_rewards(states: np.ndarray, phi: np.ndarray, params: RewardParams) -> np.ndarray:
    """max(0, reward of transmitting) per cell per state row."""
    per_cell = (
        params.rho_idle * (1 - states)
        + params.rho_busy * states
        - params.interference_weight * (states @ phi)
    )
    return np.maximum(per_cell, 0.0)


def full_info_upper_bound_exact(
    phi: np.ndarray,
    params: RewardParams,
    occupancy_prob: float,
    max_cells: int = DEFAULT_ENUM_CELLS,
) -> float:
    """Average network reward when every cell knows the exact global state.

    Exact enumeration over all 2**n states; refuses networks larger than
    ``max_cells`` (use the Monte Carlo estimator there).
    """
    pi = _check_prob(occupancy_prob, "occupancy_prob")
    phi = np.asarray(phi, dtype=float)
    n = phi.shape[0]
    if n > max_cells:
        raise EnumerationLimitError(
            f"{n} cells means 2**{n} states; cap is {max_cells} cells, "
            "use full_info_upper_bound_mc instead"
        )
    states = _state_table(n)
    occupied = states.sum(axis=1)
    weights = pi**occupied * (1.0 - pi) ** (n - occupied)  # 0**0 == 1 covers pi in {0, 1}
    return float(weights @ _transmit_rewards(states, phi, params).sum(axis=1))


def full_info_upper_bound_mc(
    phi: np.ndarray,
    params: RewardParams,
    occupancy_prob: float,
    n_samples: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Monte Carlo (mean, standard error) of the full-information reward."""
    pi = _check_prob(occupancy_prob, "occupancy_prob")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    phi = np.asarray(phi, dtype=float)
    n = phi.shape[0]
    draws = (rng.random((n_samples, n)) < pi).astype(float)
    totals = _transmit_rewards(draws, phi, params).sum(axis=1)
    mean = float(totals.mean())
    stderr = float(totals.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    return mean, stderr
