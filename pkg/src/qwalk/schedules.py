"""Step-length schedules: random two-point, periodic and constant.

Schedules are described on the command line by strings such as
``random:alpha=0.5,n=1``, ``periodic:1,2`` or ``constant:1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Constant",
    "Periodic",
    "RandomTwoPoint",
    "SeedSpec",
    "StepSchedule",
    "format_schedule",
    "l_max",
    "parse_schedule",
    "realization_rng",
    "sample_sequence",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomTwoPoint:
    """ell = 1 with probability alpha, ell = 2**n otherwise, drawn afresh every tick."""

    alpha: float
    n: int

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "n", int(self.n))

    @property
    def l_max(self) -> int:
        return 2**self.n

    @property
    def is_random(self) -> bool:
        return 0.0 < self.alpha < 1.0

    def mean_length(self) -> float:
        return self.alpha + self.l_max * (1.0 - self.alpha)


@dataclass(frozen=True)
class Periodic:
    """Cycle deterministically through ``lengths``."""

    lengths: tuple[int, ...]

    def __post_init__(self):
        lengths = tuple(int(v) for v in self.lengths)
        if not lengths:
            raise ValueError("periodic schedule needs at least one length")
        if min(lengths) < 1:
            raise ValueError(f"step lengths must be >= 1, got {lengths}")
        object.__setattr__(self, "lengths", lengths)

    @property
    def l_max(self) -> int:
        return max(self.lengths)


@dataclass(frozen=True)
class Constant:
    ell: int

    def __post_init__(self):
        if int(self.ell) != self.ell or self.ell < 1:
            raise ValueError(f"step length must be an integer >= 1, got {self.ell}")
        object.__setattr__(self, "ell", int(self.ell))

    @property
    def l_max(self) -> int:
        return self.ell


StepSchedule = Union[RandomTwoPoint, Periodic, Constant]


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    realization_index: int = 0

    def __post_init__(self):
        if self.realization_index < 0:
            raise ValueError("realization_index must be >= 0")


def realization_rng(seed: SeedSpec) -> np.random.Generator:
    """Counter-based Philox stream keyed by (master_seed, realization_index).

    ``SeedSequence`` hashes both integers, so neighbouring realizations get
    statistically independent streams and no stream depends on how the
    realizations are distributed over workers.
    """
    ss = np.random.SeedSequence(
        entropy=int(seed.master_seed) & _MASK64, spawn_key=(int(seed.realization_index),)
    )
    return np.random.Generator(np.random.Philox(ss))


def l_max(schedule: StepSchedule) -> int:
    return schedule.l_max


def sample_sequence(schedule: StepSchedule, t_max: int, seed: SeedSpec) -> np.ndarray:
    """Step lengths ell(1), ..., ell(t_max) as an int64 array."""
    if t_max < 1:
        raise ValueError(f"t_max must be >= 1, got {t_max}")
    if isinstance(schedule, RandomTwoPoint):
        u = realization_rng(seed).random(t_max)
        return np.where(u < schedule.alpha, 1, schedule.l_max).astype(np.int64)
    if isinstance(schedule, Periodic):
        return np.resize(np.asarray(schedule.lengths, dtype=np.int64), t_max)
    if isinstance(schedule, Constant):
        return np.full(t_max, schedule.ell, dtype=np.int64)
    raise TypeError(f"unknown schedule type {type(schedule).__name__}")


def parse_schedule(text: str) -> StepSchedule:
    """Parse ``random:alpha=A,n=N``, ``periodic:L1,L2,...`` or ``constant:L``."""
    kind, sep, body = text.strip().partition(":")
    if not sep:
        raise ValueError(f"schedule {text!r} lacks a 'kind:' prefix")
    kind = kind.lower()
    try:
        if kind == "random":
            params = dict(item.split("=", 1) for item in body.split(","))
            unknown = set(params) - {"alpha", "n"}
            if unknown or "alpha" not in params:
                raise ValueError(f"expected alpha=..,n=.. in {text!r}")
            return RandomTwoPoint(float(params["alpha"]), int(params.get("n", 1)))
        if kind == "periodic":
            return Periodic(tuple(int(v) for v in body.split(",")))
        if kind == "constant":
            return Constant(int(body))
    except ValueError as exc:
        raise ValueError(f"bad schedule {text!r}: {exc}") from exc
    raise ValueError(f"unknown schedule kind {kind!r} (random, periodic, constant)")


def format_schedule(schedule: StepSchedule) -> str:
    if isinstance(schedule, RandomTwoPoint):
        return f"random:alpha={schedule.alpha!r},n={schedule.n}"
    if isinstance(schedule, Periodic):
        return "periodic:" + ",".join(str(v) for v in schedule.lengths)
    return f"constant:{schedule.ell}"
