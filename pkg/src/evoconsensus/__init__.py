"""Average consensus over graphs whose links evolve by a fitness game."""

from .dynamics import SimConfig, Trajectory, conservation_check, run_trial, seed_mix, step
from .game import (
    ConfigError,
    GameParams,
    delta_fitness_create,
    delta_fitness_drop,
    fitness,
    weight_create,
    weight_maintain,
)
from .harness import ExperimentReport, emit_csv, load_config, read_csv, run_ensemble
from .laplacian import (
    EdgeDecisions,
    laplacian_matvec,
    laplacian_of,
    next_edge_state,
    sample_decisions,
    weighted_laplacian,
)
from .metrics import (
    EnsembleCurve,
    bound_check,
    default_fit_window,
    disagreement,
    fit_decay_rate,
    lyapunov,
)
from .spectral import Spectrum, fiedler_value, spectrum
from .topology import (
    EdgeState,
    FeasibleGraph,
    GraphGenerationError,
    generate_feasible_graph,
    init_active_sets,
    is_connected,
)

__version__ = "0.1.0"
