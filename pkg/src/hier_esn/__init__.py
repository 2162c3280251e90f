"""Hierarchical echo state networks (Shallow, Wide, Deep) with per-sub-reservoir
hyperparameters, ridge readouts and microbial-GA hyperparameter search."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BuildError, ConvergenceError, DataError, DegenerateInputError, DimensionError,
    HierEsnError, InsufficientDataError, SingularSystemError,
)
from .numerics import (  # noqa: E402
    SeededRng, derive_seed, fft_magnitude, ridge_solve, spectral_radius_estimate,
    squared_correlation,
)
from .reservoir import (  # noqa: E402
    HyperParams, ReservoirNetwork, StateTrace, Topology, build_network, run_sequence,
    split_sizes, step,
)
from .readout import FeatureSpec, Readout, nrmse, predict_sequence, train_readout  # noqa: E402
from .tasks import (  # noqa: E402
    DatasetSplit, TimeSeries, gen_mackey_glass, gen_mso12, gen_narma10, load_santa_fe,
    make_task, split_dataset,
)
from .optimizer import (  # noqa: E402
    GaConfig, GaResult, crossover_into_loser, duel, evaluate_fitness, mutate, optimize,
    random_population,
)
from .analysis import (  # noqa: E402
    memory_capacity, node_state_distribution, sub_reservoir_spectrum,
)
