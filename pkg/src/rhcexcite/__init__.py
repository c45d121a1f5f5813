"""Excitation signal design by receding-horizon optimization of a weighted
nearest-neighbor space-filling criterion."""

from ._backend import BACKEND
from .core import (
    ConfigError,
    Constraints,
    ExcitationSignal,
    RunConfig,
    denormalize_point,
    normalize_point,
    seeded_rng,
)
from .criterion import (
    Boost,
    DistanceDataset,
    WeightingScheme,
    assign_weights,
    build_psi,
    criterion_j,
    fill_distance,
    nn_distance,
)
from .optimizer import (
    DesignInfeasibleError,
    DesignState,
    SaConfig,
    design_signal,
    evaluate_candidate,
    sa_optimize,
)
from .plant import PlantModel, process_distribution
from .surrogate import IoRecord, SurrogateModel, refit, simulate

__version__ = "0.1.0"
