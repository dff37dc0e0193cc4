import numpy as np
import pytest

from hiersense.decision import RewardParams
from hiersense.occupancy import MarkovParams


@pytest.fixture
def reference_rewards() -> RewardParams:
    """rho_idle=1, rho_busy=0, interference weight 1 (the study defaults)."""
    return RewardParams(1.0, 0.0, 1.0)


@pytest.fixture
def reference_markov() -> MarkovParams:
    return MarkovParams(0.1, 0.1)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
