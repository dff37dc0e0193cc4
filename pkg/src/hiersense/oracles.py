"""Independent reference computations for validating the closed forms.

Everything here recomputes quantities the package derives analytically, by a
different route: posteriors by brute-force enumeration over all network
states, history-aware beliefs by an exact forward filter on the full joint
state space, and long-run rewards by slot simulation. These stay deliberately
separate from the closed-form code paths they check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aggregation import aggregate_up, observe, observe_states
from .analysis import closed_form_average_reward
from .decision import RewardParams, belief_joint, network_reward_per_slot
from .hierarchy import (
    AggregationTree,
    DistanceClassIndex,
    _make_tree,
    build_distance_index,
    build_greedy_tree,
    build_regular_tree,
    validate_tree,
)
from .interference import BlockageLayout, GridTopology, build_interference_matrix
from .occupancy import MarkovParams, simulate_states, steady_state_probability

__all__ = [
    "enumerate_states",
    "brute_force_posterior",
    "exact_filter_posteriors",
    "random_tree",
    "simulate_average_reward",
    "BeliefCheckReport",
    "RewardCheckReport",
    "run_belief_suite",
    "run_average_reward_suite",
]


def enumerate_states(n_cells: int) -> np.ndarray:
    """(2**n, n) int8 matrix of every binary network state."""
    codes = np.arange(2**n_cells, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n_cells)[None, :]) & 1).astype(np.int8)


def _class_counts(index: DistanceClassIndex, cell: int, states: np.ndarray) -> np.ndarray:
    """(n_states, depth+1) per-class occupied counts for a batch of states."""
    counts = np.zeros((states.shape[0], index.depth + 1))
    for lvl, members in enumerate(index.classes[cell]):
        if members:
            counts[:, lvl] = states[:, list(members)].sum(axis=1)
    return counts


def brute_force_posterior(
    index: DistanceClassIndex, cell: int, obs, occupancy_prob: float
) -> np.ndarray:
    """Posterior over all states given one cell's observations, by Bayes' rule.

    Weights every state by its independent-Bernoulli prior, keeps the states
    whose per-class counts reproduce the observation, and normalises by
    explicit summation. No combinatorial shortcut.
    """
    obs = np.asarray(obs)
    states = enumerate_states(index.n_cells).astype(float)
    occupied = states.sum(axis=1)
    prior = occupancy_prob**occupied * (1.0 - occupancy_prob) ** (index.n_cells - occupied)
    consistent = (_class_counts(index, cell, states) == obs[None, :]).all(axis=1)
    weights = prior * consistent
    if weights.sum() == 0.0:
        raise ValueError("observation is unreachable under this tree")
    return weights / weights.sum()


def _transition_matrix(n_cells: int, params: MarkovParams) -> np.ndarray:
    """(2**n, 2**n) slot-transition matrix of the joint occupancy chain."""
    kernel = np.array([[1.0 - params.p, params.p], [params.q, 1.0 - params.q]])
    states = enumerate_states(n_cells)
    joint = np.ones((states.shape[0], states.shape[0]))
    for j in range(n_cells):
        joint *= kernel[states[:, j][:, None], states[:, j][None, :]]
    return joint


def exact_filter_posteriors(
    index: DistanceClassIndex,
    cell: int,
    trajectory: np.ndarray,
    params: MarkovParams,
) -> list[np.ndarray]:
    """History-aware Bayes filter over the full joint state space.

    Starting from the steady-state product prior, alternately conditions on
    the cell's observation of each slot (a deterministic function of the true
    state) and pushes the posterior through the joint transition matrix.
    Returns the filtered posterior for every slot of the trajectory.
    """
    n = index.n_cells
    states = enumerate_states(n).astype(float)
    occupied = states.sum(axis=1)
    pi = steady_state_probability(params)
    prior = pi**occupied * (1.0 - pi) ** (n - occupied)
    transition = _transition_matrix(n, params)
    counts = _class_counts(index, cell, states)

    posteriors = []
    for state in np.asarray(trajectory):
        obs = counts[int(np.flatnonzero((states == state[None, :]).all(axis=1))[0])]
        weights = prior * (counts == obs[None, :]).all(axis=1)
        posterior = weights / weights.sum()
        posteriors.append(posterior)
        prior = posterior @ transition
    return posteriors


def random_tree(n_cells: int, depth: int, rng: np.random.Generator) -> AggregationTree:
    """Random hierarchy of exactly the requested depth (for oracle tests).

    Below the root each level keeps at least two clusters; group counts and
    memberships are drawn uniformly, so ragged merges, empty distance classes
    and no-merge levels all occur.
    """
    if n_cells > 1 and depth < 1:
        raise ValueError("depth must be >= 1 for more than one cell")
    clusters: list[tuple[int, ...]] = [(i,) for i in range(n_cells)]
    levels = [list(clusters)]
    for lvl in range(1, depth + 1):
        k = len(clusters)
        if lvl == depth:
            groups = [list(range(k))]
        else:
            m = int(rng.integers(2, k + 1)) if k > 2 else 2
            order = [int(c) for c in rng.permutation(k)]
            assignment = np.concatenate([np.arange(m), rng.integers(0, m, size=k - m)])
            groups = [[] for _ in range(m)]
            for pos, cluster_id in enumerate(order):
                groups[int(assignment[pos])].append(cluster_id)
        new_clusters = []
        for group in groups:
            merged: tuple[int, ...] = ()
            for c in group:
                merged += clusters[c]
            new_clusters.append(tuple(sorted(merged)))
        clusters = new_clusters
        levels.append(list(clusters))
    tree = _make_tree(levels)
    validate_tree(tree)
    return tree


def simulate_average_reward(
    tree: AggregationTree,
    index: DistanceClassIndex,
    markov: MarkovParams,
    params: RewardParams,
    n_slots: int,
    rng: np.random.Generator,
    n_batches: int = 100,
    chunk: int = 20_000,
    states: np.ndarray | None = None,
) -> tuple[float, float]:
    """Time-average optimal network reward over a simulated trajectory.

    Returns (mean, standard error); the error comes from batch means because
    consecutive slots are correlated through the occupancy chain. Pass a
    pre-simulated ``states`` trajectory to evaluate several trees on the same
    sample path.
    """
    if states is None:
        states = simulate_states(n_slots, index.n_cells, markov, rng)
    else:
        states = np.asarray(states)
        n_slots = states.shape[0]
    rewards = np.empty(n_slots)
    for start in range(0, n_slots, chunk):
        block = states[start : start + chunk]
        obs = observe_states(tree, block)
        rewards[start : start + len(block)] = network_reward_per_slot(obs, index, params)
    n_batches = min(n_batches, n_slots)
    usable = n_slots - (n_slots % n_batches)
    batches = rewards[:usable].reshape(n_batches, -1).mean(axis=1)
    mean = float(rewards.mean())
    stderr = float(batches.std(ddof=1) / np.sqrt(n_batches)) if n_batches > 1 else 0.0
    return mean, stderr


@dataclass(frozen=True)
class BeliefCheckReport:
    """Result of checking the product-form posterior against brute force."""

    max_error_enumeration: float
    max_error_filter: float
    cases_enumeration: int
    cases_filter: int

    def max_error(self) -> float:
        return max(self.max_error_enumeration, self.max_error_filter)


def run_belief_suite(
    seed: int = 0,
    sizes: tuple[int, ...] = (2, 4, 6),
    depths: tuple[int, ...] = (2, 3),
    occupancy_probs: tuple[float, ...] = (0.3, 0.5, 0.7),
    n_slots: int = 5,
) -> BeliefCheckReport:
    """Compare the closed-form posterior with enumeration and an exact filter.

    Enumeration: for every network size, random tree, occupancy level, true
    state and cell, the closed-form joint belief must equal the brute-force
    Bayesian posterior at every candidate state. Filter: over a simulated
    trajectory, the belief computed from the current observation alone must
    equal the history-aware filter posterior, slot by slot.
    """
    rng = np.random.default_rng(seed)
    worst_enum, n_enum = 0.0, 0
    worst_filter, n_filter = 0.0, 0
    chains = (MarkovParams(0.1, 0.1), MarkovParams(0.15, 0.35))
    for n_cells in sizes:
        for depth in depths:
            tree = random_tree(n_cells, depth, rng)
            phi = np.abs(rng.normal(size=(n_cells, n_cells)))
            index = build_distance_index(tree, (phi + phi.T) / 2)
            states = enumerate_states(n_cells)
            # every reachable observation of every cell, deduplicated
            reachable: list[set[tuple[int, ...]]] = [set() for _ in range(n_cells)]
            for true_state in states:
                sums = aggregate_up(tree, true_state)
                for cell in range(n_cells):
                    reachable[cell].add(tuple(observe(tree, sums, cell).tolist()))
            for cell in range(n_cells):
                for obs_key in sorted(reachable[cell]):
                    obs = np.array(obs_key, dtype=np.int64)
                    beliefs = np.array(
                        [belief_joint(obs, index, cell, candidate) for candidate in states]
                    )
                    for pi in occupancy_probs:
                        reference = brute_force_posterior(index, cell, obs, pi)
                        worst_enum = max(worst_enum, float(np.abs(beliefs - reference).max()))
                        n_enum += len(states)
            for markov in chains:
                trajectory = simulate_states(n_slots, n_cells, markov, rng)
                for cell in range(n_cells):
                    filtered = exact_filter_posteriors(index, cell, trajectory, markov)
                    for t, posterior in enumerate(filtered):
                        sums = aggregate_up(tree, trajectory[t])
                        obs = observe(tree, sums, cell)
                        beliefs = np.array(
                            [belief_joint(obs, index, cell, candidate) for candidate in states]
                        )
                        worst_filter = max(worst_filter, float(np.abs(beliefs - posterior).max()))
                        n_filter += len(states)
    return BeliefCheckReport(worst_enum, worst_filter, n_enum, n_filter)


@dataclass(frozen=True)
class RewardCheckReport:
    """Closed-form long-run rewards against simulated time averages."""

    schemes: tuple[str, ...]
    closed_form: tuple[float, ...]
    simulated: tuple[float, ...]
    stderr: tuple[float, ...]

    def max_deviation_sigmas(self) -> float:
        devs = [
            abs(c - s) / e if e > 0 else (0.0 if c == s else float("inf"))
            for c, s, e in zip(self.closed_form, self.simulated, self.stderr)
        ]
        return max(devs)


def run_average_reward_suite(
    seed: int = 0,
    rows: int = 4,
    cols: int = 4,
    markov: MarkovParams = MarkovParams(0.1, 0.1),
    params: RewardParams = RewardParams(1.0, 0.0, 1.0),
    alpha: float = 2.0,
    n_slots: int = 200_000,
) -> RewardCheckReport:
    """Check the closed-form average reward against a long slot simulation.

    Runs the unblocked grid with both tree builders on a shared trajectory.
    """
    topology = GridTopology(rows, cols)
    phi = build_interference_matrix(topology, BlockageLayout(frozenset()), alpha)
    pi = steady_state_probability(markov)
    rng = np.random.default_rng(seed)
    trajectory = simulate_states(n_slots, topology.n_cells, markov, rng)
    schemes, closed, simulated, errs = [], [], [], []
    for name, tree in (
        ("regular", build_regular_tree(topology)),
        ("greedy", build_greedy_tree(phi)),
    ):
        index = build_distance_index(tree, phi)
        closed.append(closed_form_average_reward(index, params, pi))
        mean, stderr = simulate_average_reward(
            tree, index, markov, params, n_slots, rng, states=trajectory
        )
        schemes.append(name)
        simulated.append(mean)
        errs.append(stderr)
    return RewardCheckReport(tuple(schemes), tuple(closed), tuple(simulated), tuple(errs))
