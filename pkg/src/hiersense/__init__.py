"""Multi-scale spectrum sensing over cellular grids.

Builds interference-aware aggregation hierarchies, runs the per-slot
count-aggregation protocol over Markov-modulated occupancies, evaluates
closed-form beliefs and rewards, and sweeps random blockage layouts to
compare tree designs against the full-information benchmark.
"""

from .aggregation import aggregate_up, observe, observe_all, observe_states
from .analysis import (
    EnumerationLimitError,
    closed_form_average_reward,
    full_info_upper_bound_exact,
    full_info_upper_bound_mc,
)
from .decision import (
    RewardParams,
    belief_joint,
    expected_local_reward,
    network_reward,
    optimal_access,
    posterior_marginal,
    realized_reward,
)
from .experiment import ExperimentConfig, SweepResult, run_sweep, run_trial
from .hierarchy import (
    AggregationTree,
    DistanceClassIndex,
    build_distance_index,
    build_greedy_tree,
    build_regular_tree,
    format_tree,
    hierarchical_distance,
    similarity,
    validate_tree,
)
from .interference import (
    BlockageLayout,
    GridTopology,
    build_interference_matrix,
    format_layout,
    is_blocked,
    parse_layout,
    sample_blockage,
)
from .occupancy import (
    MarkovParams,
    sample_steady_state,
    simulate_states,
    steady_state_probability,
    step,
)

__version__ = "0.1.0"
