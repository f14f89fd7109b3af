"""Discrete-time quantum walks whose step length is drawn at random every tick."""

from .core import (
    DEFAULT_SPINOR,
    CapacityExceededError,
    CoinOperator,
    Density,
    InitialSpinor,
    WalkerState,
    apply_coin,
    hadamard,
    init_state,
    occupation,
    shift,
    step,
)
from .ensemble import (
    EnsembleResult,
    MomentSeries,
    QuantumWalkEnsemble,
    RunConfig,
    moments_of,
    run_ensemble,
    run_single,
)
from .schedules import Constant, Periodic, RandomTwoPoint, SeedSpec, parse_schedule, sample_sequence

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SPINOR",
    "CapacityExceededError",
    "CoinOperator",
    "Constant",
    "Density",
    "EnsembleResult",
    "InitialSpinor",
    "MomentSeries",
    "Periodic",
    "QuantumWalkEnsemble",
    "RandomTwoPoint",
    "RunConfig",
    "SeedSpec",
    "WalkerState",
    "apply_coin",
    "hadamard",
    "init_state",
    "moments_of",
    "occupation",
    "parse_schedule",
    "run_ensemble",
    "run_single",
    "sample_sequence",
    "shift",
    "step",
]
