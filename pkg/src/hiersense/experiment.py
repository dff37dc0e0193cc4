"""Blockage-sweep experiment harness.

For each blockage probability, every trial draws one wall layout, builds the
interference matrix once, and evaluates all requested tree schemes plus the
full-information benchmark on that same matrix (paired design). Per-trial
randomness is derived from (master seed, sweep-point index, trial index), so
results are identical no matter how trials are scheduled or parallelised.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import (
    closed_form_average_reward,
    full_info_upper_bound_exact,
    full_info_upper_bound_mc,
)
from .decision import RewardParams
from .hierarchy import build_distance_index, build_greedy_tree, build_regular_tree
from .interference import BlockageLayout, GridTopology, build_interference_matrix, sample_blockage
from .occupancy import MarkovParams, steady_state_probability
from .oracles import simulate_average_reward

__all__ = ["ExperimentConfig", "SweepResult", "run_trial", "run_sweep", "CSV_HEADER"]

CSV_HEADER = "p_block,scheme,mean_reward,stderr,trials"
TREE_SCHEMES = ("regular", "greedy")
BOUND_SCHEME = "bound"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs; defaults reproduce the 4x4 reference study."""

    rows: int = 4
    cols: int = 4
    markov: MarkovParams = MarkovParams(0.1, 0.1)
    rewards: RewardParams = RewardParams(1.0, 0.0, 1.0)
    alpha: float = 2.0
    p_block_values: tuple[float, ...] = tuple(round(0.1 * k, 12) for k in range(11))
    trials: int = 200
    slots: int = 200_000
    schemes: tuple[str, ...] = TREE_SCHEMES
    eval_mode: str = "closed_form"  # or "simulate"
    bound_mode: str = "exact"  # or "mc"
    mc_samples: int = 5000
    blockage_semantics: str = "los"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid must be at least 1x1")
        if self.trials < 1 or self.slots < 1 or self.mc_samples < 1:
            raise ValueError("trials, slots and mc_samples must all be >= 1")
        if not self.p_block_values:
            raise ValueError("p_block_values must not be empty")
        for p in self.p_block_values:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"p_block value {p} outside [0, 1]")
        unknown = set(self.schemes) - set(TREE_SCHEMES)
        if unknown or not self.schemes:
            raise ValueError(f"schemes must be a nonempty subset of {TREE_SCHEMES}")
        if self.eval_mode not in ("closed_form", "simulate"):
            raise ValueError(f"unknown eval_mode: {self.eval_mode!r}")
        if self.bound_mode not in ("exact", "mc"):
            raise ValueError(f"unknown bound_mode: {self.bound_mode!r}")

    @property
    def topology(self) -> GridTopology:
        return GridTopology(self.rows, self.cols)

    @property
    def result_schemes(self) -> tuple[str, ...]:
        return tuple(self.schemes) + (BOUND_SCHEME,)


def _trial_rng(config: ExperimentConfig, point: int, trial: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=config.seed, spawn_key=(point, trial))
    return np.random.default_rng(seq)


def run_trial(
    config: ExperimentConfig,
    p_block: float,
    rng: np.random.Generator,
    layout: BlockageLayout | None = None,
) -> dict[str, float]:
    """One paired trial: a single layout evaluated under every scheme.

    Returns the average reward per requested scheme plus the
    full-information benchmark on the same interference matrix.
    """
    topology = config.topology
    if layout is None:
        layout = sample_blockage(topology, p_block, rng)
    phi = build_interference_matrix(topology, layout, config.alpha, config.blockage_semantics)
    pi = steady_state_probability(config.markov)
    out: dict[str, float] = {}
    for scheme in config.schemes:
        tree = build_regular_tree(topology) if scheme == "regular" else build_greedy_tree(phi)
        index = build_distance_index(tree, phi)
        if config.eval_mode == "closed_form":
            out[scheme] = closed_form_average_reward(index, config.rewards, pi)
        else:
            mean, _ = simulate_average_reward(
                tree, index, config.markov, config.rewards, config.slots, rng
            )
            out[scheme] = mean
    if config.bound_mode == "exact":
        out[BOUND_SCHEME] = full_info_upper_bound_exact(phi, config.rewards, pi)
    else:
        out[BOUND_SCHEME], _ = full_info_upper_bound_mc(
            phi, config.rewards, pi, config.mc_samples, rng
        )
    return out


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Per-(blockage, scheme) trial values with their summary statistics."""

    p_block_values: tuple[float, ...]
    schemes: tuple[str, ...]
    rewards: dict[str, np.ndarray]  # scheme -> (n_points, trials)

    @property
    def trials(self) -> int:
        return next(iter(self.rewards.values())).shape[1]

    def mean(self, scheme: str) -> np.ndarray:
        return self.rewards[scheme].mean(axis=1)

    def stderr(self, scheme: str) -> np.ndarray:
        values = self.rewards[scheme]
        if values.shape[1] < 2:
            return np.zeros(values.shape[0])
        out = values.std(axis=1, ddof=1) / math.sqrt(values.shape[1])
        # identical trial values (deterministic layouts) get an exact zero,
        # not the one-ulp residue of averaging
        out[np.ptp(values, axis=1) == 0.0] = 0.0
        return out

    def to_csv(self) -> str:
        """Render the documented CSV contract; stable byte-for-byte."""
        lines = [CSV_HEADER]
        for p_idx, p_block in enumerate(self.p_block_values):
            for scheme in self.schemes:
                mean = float(self.mean(scheme)[p_idx])
                err = float(self.stderr(scheme)[p_idx])
                lines.append(f"{p_block!r},{scheme},{mean!r},{err!r},{self.trials}")
        return "\n".join(lines) + "\n"


def _run_point_trial(args: tuple[ExperimentConfig, int, int]) -> tuple[int, int, dict[str, float]]:
    config, point, trial = args
    rng = _trial_rng(config, point, trial)
    return point, trial, run_trial(config, config.p_block_values[point], rng)


def run_sweep(config: ExperimentConfig, jobs: int = 1) -> SweepResult:
    """Run the full sweep; jobs > 1 spreads trials over worker processes.

    Output is deterministic in (config, seed) and independent of jobs.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    tasks = [
        (config, point, trial)
        for point in range(len(config.p_block_values))
        for trial in range(config.trials)
    ]
    if jobs == 1:
        results = map(_run_point_trial, tasks)
    else:
        chunk = max(1, len(tasks) // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_point_trial, tasks, chunksize=chunk))
    rewards = {
        scheme: np.zeros((len(config.p_block_values), config.trials))
        for scheme in config.result_schemes
    }
    for point, trial, values in results:
        for scheme, value in values.items():
            rewards[scheme][point, trial] = value
    return SweepResult(
        p_block_values=tuple(config.p_block_values),
        schemes=config.result_schemes,
        rewards=rewards,
    )
