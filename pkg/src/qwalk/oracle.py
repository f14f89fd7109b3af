"""
Small-instance ground truth.

``dense_evolve`` builds the full one-tick unitary as an explicit matrix on
the truncated (position, chirality) space and multiplies it into the state
vector. ``exact_ensemble`` replaces Monte Carlo sampling by a sum over all
2**t step sequences, weighted by their probabilities.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import Density, WalkerState, init_state, occupation, step
from .ensemble import CHUNK, RunConfig, _Accumulator, _evolve, _sequences, resolve_threads
from .schedules import RandomTwoPoint

__all__ = [
    "DENSE_T_LIMIT",
    "EXACT_T_LIMIT",
    "ExactEnsemble",
    "OracleLimitError",
    "TruncatedHilbert",
    "dense_evolve",
    "enumerate_sequences",
    "exact_ensemble",
    "exact_ensemble_stats",
    "monte_carlo_comparison",
]

DENSE_T_LIMIT = 12
EXACT_T_LIMIT = 16


class OracleLimitError(ValueError):
    """Requested instance is too large for brute force."""


@dataclass(frozen=True)
class TruncatedHilbert:
    """Position window [-l_max t, l_max t] times chirality; basis index 2*i + c, c=0 for L."""

    l_max: int
    t: int

    @property
    def n_sites(self) -> int:
        return 2 * self.l_max * self.t + 1

    @property
    def dimension(self) -> int:
        return 2 * self.n_sites

    def coin_matrix(self, coin) -> np.ndarray:
        return np.kron(np.eye(self.n_sites), coin.entries)

    def shift_matrix(self, ell: int) -> np.ndarray:
        """Cyclic translation: R by +ell, L by -ell. Unitary; no wrap occurs inside the light cone."""
        n = self.n_sites
        m = np.zeros((self.dimension, self.dimension))
        for i in range(n):
            m[2 * ((i - ell) % n), 2 * i] = 1.0
            m[2 * ((i + ell) % n) + 1, 2 * i + 1] = 1.0
        return m

    def step_unitary(self, coin, ell: int) -> np.ndarray:
        return self.shift_matrix(ell) @ self.coin_matrix(coin)


def dense_evolve(config: RunConfig, sequence) -> WalkerState:
    """Evolve ``config.spinor`` through ``sequence`` by explicit matrix products."""
    seq = [int(v) for v in sequence]
    t = len(seq)
    if t > DENSE_T_LIMIT:
        raise OracleLimitError(f"dense oracle limited to t <= {DENSE_T_LIMIT}, got {t}")
    if t == 0 or min(seq) < 1:
        raise ValueError("sequence must be nonempty with lengths >= 1")
    space = TruncatedHilbert(max(config.schedule.l_max, max(seq)), t)
    cap = space.l_max * t
    vec = np.zeros(space.dimension, dtype=np.complex128)
    vec[2 * cap] = config.spinor.a0
    vec[2 * cap + 1] = config.spinor.b0
    for ell in seq:
        vec = space.step_unitary(config.coin, ell) @ vec
    return WalkerState(vec[0::2].copy(), vec[1::2].copy(), cap, t)


def enumerate_sequences(schedule: RandomTwoPoint, t: int):
    """Yield (sequence, probability) for every sequence of length t, lexicographically."""
    a, b = schedule.alpha, 1.0 - schedule.alpha
    for seq in itertools.product((1, schedule.l_max), repeat=t):
        ones = seq.count(1)
        yield seq, a**ones * b ** (t - ones)


@dataclass
class ExactEnsemble:
    """Exact disorder mean of f(x, t) and the per-site variance across sequences."""

    density: Density
    variance: np.ndarray
    weight_total: float


def exact_ensemble_stats(config: RunConfig) -> ExactEnsemble:
    schedule = config.schedule
    if not isinstance(schedule, RandomTwoPoint):
        raise ValueError("exact enumeration needs a random two-point schedule")
    t_max = config.t_max
    if t_max > EXACT_T_LIMIT:
        raise OracleLimitError(f"exact enumeration limited to t <= {EXACT_T_LIMIT}, got {t_max}")
    cap = schedule.l_max * t_max
    choices = ((1, schedule.alpha), (schedule.l_max, 1.0 - schedule.alpha))
    first = _Accumulator(2 * cap + 1)
    second = _Accumulator(2 * cap + 1)
    weights = []

    # depth-first over prefixes in lexicographic order; zero-weight branches contribute nothing
    def visit(state, weight):
        if state.time == t_max:
            f = occupation(state).values
            first.add(weight * f)
            second.add(weight * f * f)
            weights.append(weight)
            return
        for ell, p in choices:
            if p > 0.0:
                visit(step(state, config.coin, ell), weight * p)

    visit(init_state(config.spinor, cap), 1.0)
    mean = first.total
    var = np.maximum(second.total - mean * mean, 0.0)
    return ExactEnsemble(Density(mean, cap, t_max), var, math.fsum(weights))


def exact_ensemble(config: RunConfig) -> Density:
    """Sum over all step sequences s of P(s) f_s(x, t_max)."""
    return exact_ensemble_stats(config).density


@dataclass
class MonteCarloComparison:
    x: np.ndarray
    exact: np.ndarray
    monte_carlo: np.ndarray
    std_error: np.ndarray
    z: np.ndarray

    @property
    def max_abs_z(self) -> float:
        return float(np.max(np.abs(self.z)))

    def fraction_above(self, threshold: float) -> float:
        informative = self.std_error > 0
        if not informative.any():
            return 0.0
        return float(np.mean(np.abs(self.z[informative]) > threshold))


def monte_carlo_comparison(config: RunConfig, threads: int | None = None) -> MonteCarloComparison:
    """Per-site z-scores of the sampled mean density at t_max against exact enumeration.

    Standard errors use the exact across-sequence variance, so sites whose
    value is the same for every sequence get z = 0 when they agree.
    """
    exact = exact_ensemble_stats(config)
    cfg = config.replace(snapshot_times=(config.t_max,))
    n = cfg.n_realizations
    acc = _Accumulator(cfg.n_positions)

    def work(start):
        _, snaps = _evolve(cfg, _sequences(cfg, start, min(start + CHUNK, n)))
        return snaps[:, 0, :]

    with ThreadPoolExecutor(max_workers=resolve_threads(threads)) as pool:
        for snaps in pool.map(work, range(0, n, CHUNK)):
            for row in snaps:
                acc.add(row)
    mc = acc.total / n
    se = np.sqrt(exact.variance / n)
    diff = mc - exact.density.values
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, diff / se, np.where(np.abs(diff) < 1e-12, 0.0, np.inf))
    return MonteCarloComparison(exact.density.positions, exact.density.values, mc, se, z)
