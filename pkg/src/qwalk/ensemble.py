"""
Disorder averaging over independent step-length realizations.

Each realization is evolved exactly (its density is the full quantum
occupation probability); the only averaging is over step sequences.
Realizations are processed in fixed-size chunks that may run on a thread
pool, and partial results are folded in realization-index order with
compensated summation, so the output does not depend on the number of
threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import _kernels
from .core import (
    DEFAULT_SPINOR,
    CapacityExceededError,
    CoinOperator,
    Density,
    InitialSpinor,
    hadamard,
)
from .schedules import SeedSpec, StepSchedule, parse_schedule, sample_sequence

__all__ = [
    "DEFAULT_REALIZATIONS",
    "MAX_POSITIONS",
    "EnsembleResult",
    "MemoryCeilingError",
    "MomentSeries",
    "QuantumWalkEnsemble",
    "RunConfig",
    "check_memory",
    "default_snapshot_times",
    "moments_of",
    "resolve_threads",
    "run_ensemble",
    "run_single",
]

DEFAULT_REALIZATIONS = 1000
MAX_POSITIONS = 2**22
CHUNK = 16


class MemoryCeilingError(ValueError):
    """A run would need more than MAX_POSITIONS lattice sites per realization."""


def check_memory(t_max: int, l_max: int) -> None:
    if t_max * l_max > MAX_POSITIONS:
        raise MemoryCeilingError(
            f"t_max * l_max = {t_max * l_max} exceeds the ceiling of {MAX_POSITIONS} "
            "lattice positions per realization"
        )


def default_snapshot_times(t_max: int) -> list[int]:
    """Powers of two up to ``t_max``, plus ``t_max`` itself."""
    times = [1 << k for k in range(int(t_max).bit_length()) if (1 << k) <= t_max]
    if times[-1] != t_max:
        times.append(int(t_max))
    return times


def resolve_threads(threads: int | None) -> int:
    """Worker count: explicit value, else $QWALK_THREADS, else 1."""
    if threads is None:
        env = os.environ.get("QWALK_THREADS")
        threads = int(env) if env else 1
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    return int(threads)


@dataclass(frozen=True)
class RunConfig:
    schedule: StepSchedule
    t_max: int
    n_realizations: int = DEFAULT_REALIZATIONS
    master_seed: int = 1
    coin: CoinOperator = field(default_factory=hadamard)
    spinor: InitialSpinor = DEFAULT_SPINOR
    snapshot_times: tuple[int, ...] | None = None

    def __post_init__(self):
        if isinstance(self.schedule, str):
            object.__setattr__(self, "schedule", parse_schedule(self.schedule))
        if self.t_max < 1:
            raise ValueError(f"t_max must be >= 1, got {self.t_max}")
        if self.n_realizations < 1:
            raise ValueError(f"n_realizations must be >= 1, got {self.n_realizations}")
        snaps = self.snapshot_times
        snaps = default_snapshot_times(self.t_max) if snaps is None else snaps
        snaps = tuple(sorted({int(t) for t in snaps}))
        if not snaps or snaps[0] < 0 or snaps[-1] > self.t_max:
            raise ValueError(f"snapshot times must be nonempty and within [0, {self.t_max}]")
        object.__setattr__(self, "snapshot_times", snaps)

    @property
    def capacity(self) -> int:
        return self.schedule.l_max * self.t_max

    @property
    def n_positions(self) -> int:
        return 2 * self.capacity + 1

    def replace(self, **changes) -> RunConfig:
        kw = {k: getattr(self, k) for k in self.__dataclass_fields__}
        kw.update(changes)
        if "t_max" in changes and "snapshot_times" not in changes:
            kw["snapshot_times"] = None
        return RunConfig(**kw)


@dataclass
class MomentSeries:
    """Per-tick moments about the origin; index i is tick ``t[i]``."""

    t: np.ndarray
    mean: np.ndarray
    second_moment: np.ndarray
    variance: np.ndarray
    norm: np.ndarray | None = None

    def quantity(self, name: str) -> np.ndarray:
        if name not in ("mean", "second_moment", "variance"):
            raise ValueError(f"unknown moment {name!r}")
        return getattr(self, name)

    def window(self, t_min: int, t_max: int) -> MomentSeries:
        m = (self.t >= t_min) & (self.t <= t_max)
        norm = None if self.norm is None else self.norm[m]
        return MomentSeries(self.t[m], self.mean[m], self.second_moment[m], self.variance[m], norm)


@dataclass
class EnsembleResult:
    densities: list[Density]
    moments: MomentSeries
    n_realizations: int
    config: RunConfig
    max_norm_error: float

    def density_at(self, t: int) -> Density:
        for d in self.densities:
            if d.time == t:
                return d
        raise KeyError(f"no snapshot at t={t}; have {[d.time for d in self.densities]}")


def moments_of(density: Density) -> tuple[float, float, float]:
    """(<x>, <x^2>, <x^2> - <x>^2) about x = 0."""
    x = density.positions.astype(np.float64)
    f = density.values
    mean = float(np.dot(x, f))
    second = float(np.dot(x * x, f))
    return mean, second, second - mean * mean


def _slots(config: RunConfig) -> np.ndarray:
    slot = np.full(config.t_max + 1, -1, dtype=np.int64)
    for k, t in enumerate(config.snapshot_times):
        slot[t] = k
    return slot


def _evolve(config: RunConfig, sequences: np.ndarray):
    """Raw per-realization moment sums and snapshot densities for a batch."""
    sequences = np.ascontiguousarray(sequences, dtype=np.int64)
    r = sequences.shape[0]
    cap = config.capacity
    moments = np.zeros((r, config.t_max + 1, 3))
    snaps = np.zeros((r, len(config.snapshot_times), 2 * cap + 1))
    code = _kernels.evolve_batch(
        sequences,
        np.ascontiguousarray(config.coin.entries),
        config.spinor.a0,
        config.spinor.b0,
        cap,
        _slots(config),
        moments,
        snaps,
    )
    if code:
        raise CapacityExceededError(f"step sequence overran capacity {cap} at tick {code}")
    return moments, snaps


def _sequences(config: RunConfig, start: int, stop: int) -> np.ndarray:
    return np.stack(
        [
            sample_sequence(config.schedule, config.t_max, SeedSpec(config.master_seed, k))
            for k in range(start, stop)
        ]
    )


def _trim(values: np.ndarray, cap: int, half: int, t: int) -> Density:
    return Density(values[cap - half : cap + half + 1].copy(), half, t)


def run_single(config: RunConfig, realization_index: int) -> tuple[list[Density], MomentSeries]:
    """Evolve one realization; snapshots at ``config.snapshot_times`` and moments at every tick."""
    seq = sample_sequence(
        config.schedule, config.t_max, SeedSpec(config.master_seed, realization_index)
    )
    moments, snaps = _evolve(config, seq[None, :])
    lm = config.schedule.l_max
    dens = [
        _trim(snaps[0, k], config.capacity, lm * t, t)
        for k, t in enumerate(config.snapshot_times)
    ]
    m = moments[0]
    series = MomentSeries(
        np.arange(config.t_max + 1), m[:, 1], m[:, 2], m[:, 2] - m[:, 1] ** 2, norm=m[:, 0]
    )
    return dens, series


class _Accumulator:
    """Neumaier-compensated running sum over arrays."""

    def __init__(self, shape):
        self.s = np.zeros(shape)
        self.c = np.zeros(shape)

    def add(self, x):
        t = self.s + x
        big = np.abs(self.s) >= np.abs(x)
        self.c += np.where(big, (self.s - t) + x, (x - t) + self.s)
        self.s = t

    @property
    def total(self):
        return self.s + self.c


def run_ensemble(config: RunConfig, threads: int | None = None) -> EnsembleResult:
    """Average densities and moments over ``config.n_realizations`` realizations.

    The result is bit-identical for every ``threads`` value.
    """
    threads = resolve_threads(threads)
    n = config.n_realizations
    cap = config.capacity
    nsnap = len(config.snapshot_times)
    mom_acc = _Accumulator((config.t_max + 1, 3))
    snap_acc = _Accumulator((nsnap, 2 * cap + 1))
    max_norm_error = 0.0

    def work(start):
        stop = min(start + CHUNK, n)
        return _evolve(config, _sequences(config, start, stop))

    starts = range(0, n, CHUNK)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map() yields in submission order, so folding stays index-ordered
        for moments, snaps in pool.map(work, starts):
            max_norm_error = max(max_norm_error, float(np.max(np.abs(moments[:, :, 0] - 1.0))))
            for r in range(moments.shape[0]):
                mom_acc.add(moments[r])
                snap_acc.add(snaps[r])

    mom = mom_acc.total / n
    dens_all = snap_acc.total / n
    lm = config.schedule.l_max
    densities = [
        _trim(dens_all[k], cap, lm * t, t) for k, t in enumerate(config.snapshot_times)
    ]
    # variance is that of the averaged density, not an average of variances
    mean, second = mom[:, 1], mom[:, 2]
    moments = MomentSeries(
        np.arange(config.t_max + 1), mean, second, second - mean * mean, norm=mom[:, 0]
    )
    return EnsembleResult(densities, moments, n, config, max_norm_error)


class QuantumWalkEnsemble(BaseEstimator):
    """Estimator-style front end to :func:`run_ensemble`.

    Parameters
    ----------
    schedule : str or schedule object
        e.g. ``"random:alpha=0.5,n=1"``.
    t_max : int
    n_realizations : int
    seed : int
        Master seed; realization ``k`` draws from a stream keyed by (seed, k).
    snapshot_times : sequence of int, optional
    a0, b0 : complex
        Initial chirality amplitudes at the origin.
    coin : "hadamard" or 2x2 array
    n_jobs : int, optional
        Worker threads; does not affect the result.

    Attributes
    ----------
    result_ : EnsembleResult
    moments_ : MomentSeries
    densities_ : list of Density
    """

    def __init__(
        self,
        schedule="random:alpha=0.5,n=1",
        t_max=1024,
        n_realizations=DEFAULT_REALIZATIONS,
        seed=1,
        snapshot_times=None,
        a0=DEFAULT_SPINOR.a0,
        b0=DEFAULT_SPINOR.b0,
        coin="hadamard",
        n_jobs=None,
    ):
        self.schedule = schedule
        self.t_max = t_max
        self.n_realizations = n_realizations
        self.seed = seed
        self.snapshot_times = snapshot_times
        self.a0 = a0
        self.b0 = b0
        self.coin = coin
        self.n_jobs = n_jobs

    def _config(self) -> RunConfig:
        coin = hadamard() if isinstance(self.coin, str) and self.coin == "hadamard" else None
        if coin is None:
            if isinstance(self.coin, CoinOperator):
                coin = self.coin
            elif isinstance(self.coin, str):
                raise ValueError(f"unknown coin {self.coin!r}")
            else:
                coin = CoinOperator(np.asarray(self.coin))
        snaps = None if self.snapshot_times is None else tuple(self.snapshot_times)
        return RunConfig(
            schedule=self.schedule,
            t_max=int(self.t_max),
            n_realizations=int(self.n_realizations),
            master_seed=int(self.seed),
            coin=coin,
            spinor=InitialSpinor(self.a0, self.b0),
            snapshot_times=snaps,
        )

    def fit(self, X=None, y=None):
        self.result_ = run_ensemble(self._config(), threads=self.n_jobs)
        self.moments_ = self.result_.moments
        self.densities_ = self.result_.densities
        return self

    def density_at(self, t: int) -> Density:
        check_is_fitted(self, "result_")
        return self.result_.density_at(t)
