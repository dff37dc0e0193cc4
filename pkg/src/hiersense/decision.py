"""Beliefs and rewards computed from multi-scale observations.

Given a cell's observation vector, the posterior over the network state
factorises across that cell's distance classes and is uniform over the
arrangements consistent with each class count; the occupancy marginal of any
cell in a class of size n with count o is simply o/n. Expected rewards and
access decisions follow in closed form, without materialising the posterior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hierarchy import DistanceClassIndex

__all__ = [
    "RewardParams",
    "posterior_marginal",
    "belief_joint",
    "expected_local_reward",
    "optimal_access",
    "network_reward",
    "network_reward_per_slot",
    "realized_reward",
]


@dataclass(frozen=True)
class RewardParams:
    """Throughput/interference trade-off weights.

    rho_idle: throughput when transmitting in an idle cell (>= rho_busy >= 0).
    rho_busy: throughput when transmitting in an occupied cell.
    interference_weight: positive multiplier on generated interference.
    """

    rho_idle: float
    rho_busy: float
    interference_weight: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho_busy <= self.rho_idle:
            raise ValueError(
                f"need 0 <= rho_busy <= rho_idle, got rho_busy={self.rho_busy}, rho_idle={self.rho_idle}"
            )
        if self.interference_weight <= 0.0:
            raise ValueError(f"interference_weight must be positive, got {self.interference_weight}")


def posterior_marginal(count: int, class_size: int) -> float:
    """Occupancy probability of one cell in a class of class_size with count occupied."""
    if class_size < 1:
        raise ValueError(f"class_size must be >= 1, got {class_size}")
    if not 0 <= count <= class_size:
        raise ValueError(f"count {count} outside [0, {class_size}]")
    return count / class_size


def _check_obs(obs, index: DistanceClassIndex, cell: int) -> np.ndarray:
    obs = np.asarray(obs, dtype=np.int64)
    if obs.shape != (index.depth + 1,):
        raise ValueError(f"observation vector must have length {index.depth + 1}, got {obs.shape}")
    sizes = index.sizes[cell]
    if (obs < 0).any() or (obs > sizes).any():
        raise ValueError(f"observation {obs.tolist()} outside class bounds {sizes.tolist()}")
    return obs


def belief_joint(obs, index: DistanceClassIndex, cell: int, state) -> float:
    """Posterior probability of a full network state given one cell's observations.

    Product over distance classes of an indicator that the class count matches
    times the inverse number of arrangements of that count in the class. Exact
    (integer combinatorics), and independent of any earlier observations.
    """
    obs = _check_obs(obs, index, cell)
    state = np.asarray(state)
    if state.shape != (index.n_cells,):
        raise ValueError(f"state must have length {index.n_cells}, got {state.shape}")
    prob = 1.0
    for lvl, members in enumerate(index.classes[cell]):
        count = int(sum(int(state[j]) for j in members))
        if count != obs[lvl]:
            return 0.0
        prob /= math.comb(len(members), int(obs[lvl]))
    return prob


def expected_local_reward(
    access: int, obs, index: DistanceClassIndex, cell: int, params: RewardParams
) -> float:
    """Expected one-slot reward of an access decision under the class posterior.

    Zero when staying silent. When transmitting: idle/busy throughput weighted
    by the cell's own occupancy bit, minus the interference penalty summed over
    every distance class, including the class-0 self term.
    """
    if access not in (0, 1):
        raise ValueError(f"access must be 0 or 1, got {access}")
    obs = _check_obs(obs, index, cell)
    if access == 0:
        return 0.0
    own = int(obs[0])
    reward = params.rho_idle * (1 - own) + params.rho_busy * own
    for lvl in range(index.depth + 1):
        size = int(index.sizes[cell, lvl])
        if size > 0:
            expected_busy = posterior_marginal(int(obs[lvl]), size)
            reward -= params.interference_weight * expected_busy * index.phi_sums[cell, lvl]
    return float(reward)


def optimal_access(obs, index: DistanceClassIndex, cell: int, params: RewardParams) -> int:
    """Transmit only when the expected reward is strictly positive (ties abstain)."""
    return 1 if expected_local_reward(1, obs, index, cell, params) > 0.0 else 0


def network_reward_per_slot(
    observations: np.ndarray, index: DistanceClassIndex, params: RewardParams
) -> np.ndarray:
    """Optimal expected network reward for a batch of observation matrices.

    observations: (..., n_cells, depth+1) counts. Vectorised evaluation of
    sum_i max(0, expected transmit reward of cell i).
    """
    obs = np.asarray(observations, dtype=float)
    if obs.shape[-2:] != (index.n_cells, index.depth + 1):
        raise ValueError(
            f"observations must end in ({index.n_cells}, {index.depth + 1}), got {obs.shape}"
        )
    own = obs[..., 0]
    penalty = params.interference_weight * (obs * index.weights).sum(axis=-1)
    transmit = params.rho_idle * (1 - own) + params.rho_busy * own - penalty
    return np.maximum(transmit, 0.0).sum(axis=-1)


def network_reward(observations, index: DistanceClassIndex, params: RewardParams) -> float:
    """Optimal expected network reward for one slot's observation matrix."""
    obs = np.asarray(observations, dtype=np.int64)
    if (obs < 0).any() or (obs > index.sizes).any():
        raise ValueError("observations outside class bounds")
    return float(network_reward_per_slot(obs, index, params))


def realized_reward(access, state, phi: np.ndarray, params: RewardParams) -> float:
    """Ground-truth network reward of an access vector against the true state."""
    a = np.asarray(access, dtype=float)
    b = np.asarray(state, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if a.shape != b.shape or phi.shape != (a.size, a.size):
        raise ValueError(
            f"shape mismatch: access {a.shape}, state {b.shape}, phi {phi.shape}"
        )
    per_cell = (
        params.rho_idle * (1 - b)
        + params.rho_busy * b
        - params.interference_weight * (phi @ b)
    )
    return float(a @ per_cell)
