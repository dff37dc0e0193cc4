import numpy as np
import pytest
from hypothesis import given, strategies as st

from hiersense.occupancy import (
    MarkovParams,
    sample_steady_state,
    simulate_states,
    steady_state_probability,
    step,
)


def test_steady_state_reference_values():
    assert steady_state_probability(MarkovParams(0.1, 0.1)) == 0.5
    assert steady_state_probability(MarkovParams(0.0, 0.3)) == 0.0
    assert steady_state_probability(MarkovParams(0.2, 0.6)) == 0.25


def test_degenerate_and_out_of_range_params_rejected():
    with pytest.raises(ValueError):
        MarkovParams(0.0, 0.0)
    with pytest.raises(ValueError):
        MarkovParams(-0.1, 0.5)
    with pytest.raises(ValueError):
        MarkovParams(0.5, 1.1)


@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_steady_state_in_unit_interval(p, q):
    assert 0.0 <= steady_state_probability(MarkovParams(p, q)) <= 1.0


def test_step_absorbing_edges(rng):
    zeros = np.zeros(12, dtype=np.int8)
    ones = np.ones(12, dtype=np.int8)
    assert (step(zeros, MarkovParams(0.0, 0.3), rng) == 0).all()
    assert (step(ones, MarkovParams(0.3, 0.0), rng) == 1).all()


def test_step_rejects_non_binary_state(rng):
    with pytest.raises(ValueError):
        step(np.array([0, 2, 1]), MarkovParams(0.1, 0.1), rng)


def test_empirical_transition_frequencies(rng):
    # frequency-count oracle: 10^5 transitions, 3 standard errors
    params = MarkovParams(0.15, 0.3)
    states = simulate_states(2001, 50, params, rng)
    prev, nxt = states[:-1].ravel(), states[1:].ravel()
    n0 = int((prev == 0).sum())
    n1 = int((prev == 1).sum())
    p_hat = ((prev == 0) & (nxt == 1)).sum() / n0
    q_hat = ((prev == 1) & (nxt == 0)).sum() / n1
    assert abs(p_hat - params.p) <= 3 * np.sqrt(params.p * (1 - params.p) / n0)
    assert abs(q_hat - params.q) <= 3 * np.sqrt(params.q * (1 - params.q) / n1)


def test_sample_steady_state_edges(rng):
    assert (sample_steady_state(20, MarkovParams(0.0, 0.5), rng) == 0).all()
    assert (sample_steady_state(20, MarkovParams(0.5, 0.0), rng) == 1).all()


def test_sample_steady_state_mean(rng):
    # Monte Carlo oracle: mean occupied count over many draws
    params = MarkovParams(0.2, 0.6)
    pi = steady_state_probability(params)
    n_cells, n_draws = 16, 100_000
    draws = (rng.random((n_draws, n_cells)) < pi).sum(axis=1)  # same law, cheap path
    sampled = np.array(
        [sample_steady_state(n_cells, params, rng).sum() for _ in range(5000)]
    )
    se = np.sqrt(n_cells * pi * (1 - pi) / len(sampled))
    assert abs(sampled.mean() - n_cells * pi) <= 3 * se
    assert abs(draws.mean() - n_cells * pi) <= 3 * np.sqrt(n_cells * pi * (1 - pi) / n_draws)


def test_long_run_occupied_fraction(rng):
    # per-cell time averages across independent cells give an empirical stderr
    params = MarkovParams(0.1, 0.1)
    pi = steady_state_probability(params)
    states = simulate_states(1600, 64, params, rng)
    cell_means = states.mean(axis=0)
    se = cell_means.std(ddof=1) / np.sqrt(len(cell_means))
    assert abs(cell_means.mean() - pi) <= 3 * se


def test_cells_evolve_independently(rng):
    states = simulate_states(20_000, 6, MarkovParams(0.2, 0.3), rng).astype(float)
    corr = np.corrcoef(states.T)
    off_diag = corr[~np.eye(6, dtype=bool)]
    assert np.abs(off_diag).max() < 4 / np.sqrt(20_000 / 5)  # ~4 sigma with correlation time ~5


def test_reproducible_trajectories():
    params = MarkovParams(0.3, 0.2)
    a = simulate_states(500, 8, params, np.random.default_rng(7))
    b = simulate_states(500, 8, params, np.random.default_rng(7))
    assert (a == b).all()


def test_burn_in_and_explicit_init(rng):
    init = np.zeros(4, dtype=np.int8)
    states = simulate_states(10, 4, MarkovParams(0.0, 0.5), rng, init=init, burn_in=3)
    assert (states == 0).all()
