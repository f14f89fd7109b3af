"""
Single-realization evolution of a one-dimensional coined quantum walk.

The walker lives on the integer lattice with a two-level chirality
(left, right). One tick applies the coin at every site and then the
conditional translation: the right-moving component is shifted by
``+ell`` and the left-moving one by ``-ell``, with the same ``ell`` for
both components.

Amplitudes are stored in dense arrays indexed by ``x + origin_index``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "CapacityExceededError",
    "CoinOperator",
    "Density",
    "InitialSpinor",
    "DEFAULT_SPINOR",
    "WalkerState",
    "apply_coin",
    "hadamard",
    "init_state",
    "occupation",
    "shift",
    "step",
]


class CapacityExceededError(RuntimeError):
    """Raised when a translation would move amplitude off the stored lattice."""


@dataclass(frozen=True)
class CoinOperator:
    """2x2 unitary acting on (psi_L, psi_R), rows and columns ordered L then R."""

    entries: NDArray[np.complex128]

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError(f"coin must be 2x2, got shape {m.shape}")
        if not np.allclose(m @ m.conj().T, np.eye(2), rtol=0.0, atol=1e-12):
            raise ValueError("coin is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)


def hadamard() -> CoinOperator:
    """(psi_L, psi_R) -> ((psi_L + psi_R)/sqrt2, (psi_L - psi_R)/sqrt2)."""
    return CoinOperator(np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0))


@dataclass(frozen=True)
class InitialSpinor:
    """Chirality amplitudes placed at the origin at t = 0."""

    a0: complex
    b0: complex

    def __post_init__(self):
        object.__setattr__(self, "a0", complex(self.a0))
        object.__setattr__(self, "b0", complex(self.b0))
        norm = abs(self.a0) ** 2 + abs(self.b0) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"spinor not normalized: |a0|^2 + |b0|^2 = {norm!r}")


# asymmetric default chirality: (sqrt(1/3), sqrt(2/3))
DEFAULT_SPINOR = InitialSpinor(np.sqrt(1.0 / 3.0), np.sqrt(2.0 / 3.0))


@dataclass
class WalkerState:
    """Two chirality amplitude fields over the same window of lattice sites.

    Attributes
    ----------
    psi_left, psi_right : ndarray of complex128
        Amplitudes; index ``i`` holds lattice site ``x = i - origin_index``.
    origin_index : int
        Array index of the site ``x = 0``.
    time : int
        Number of ticks applied so far.
    """

    psi_left: NDArray[np.complex128]
    psi_right: NDArray[np.complex128]
    origin_index: int
    time: int = 0

    def __post_init__(self):
        if self.psi_left.shape != self.psi_right.shape or self.psi_left.ndim != 1:
            raise ValueError("psi_left and psi_right must be 1-d arrays of equal length")

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(self.psi_left.size, dtype=np.int64) - self.origin_index

    @property
    def capacity(self) -> int:
        """Largest |x| representable on both sides of the origin."""
        return min(self.origin_index, self.psi_left.size - 1 - self.origin_index)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi_left) ** 2 + np.abs(self.psi_right) ** 2))

    def copy(self) -> WalkerState:
        return WalkerState(
            self.psi_left.copy(), self.psi_right.copy(), self.origin_index, self.time
        )


@dataclass
class Density:
    """Occupation probability f(x, t) on a window of lattice sites."""

    values: NDArray[np.float64]
    origin_index: int
    time: int
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(self.values.size, dtype=np.int64) - self.origin_index

    def at(self, x: int) -> float:
        i = x + self.origin_index
        if 0 <= i < self.values.size:
            return float(self.values[i])
        return 0.0

    def support(self) -> tuple[int, int]:
        """(min x, max x) among sites with f > 0."""
        nz = np.flatnonzero(self.values > 0.0)
        if nz.size == 0:
            raise ValueError("density is identically zero")
        return int(nz[0] - self.origin_index), int(nz[-1] - self.origin_index)

    def mirrored(self) -> Density:
        """The density reflected through x = 0."""
        v = self.values[::-1].copy()
        return Density(v, self.values.size - 1 - self.origin_index, self.time)

    def trimmed(self) -> Density:
        """Smallest window symmetric about the origin that contains the support."""
        lo, hi = self.support()
        half = max(abs(lo), abs(hi))
        o = self.origin_index
        v = np.zeros(2 * half + 1)
        a, b = max(0, o - half), min(self.values.size, o + half + 1)
        v[a - o + half : b - o + half] = self.values[a:b]
        return Density(v, half, self.time)


def init_state(spinor: InitialSpinor, capacity: int) -> WalkerState:
    """Walker localized at the origin with chirality (a0, b0), sites in [-capacity, capacity]."""
    if capacity < 1:
        raise ValueError(f"capacity must be >= 1, got {capacity}")
    size = 2 * capacity + 1
    left = np.zeros(size, dtype=np.complex128)
    right = np.zeros(size, dtype=np.complex128)
    left[capacity] = spinor.a0
    right[capacity] = spinor.b0
    return WalkerState(left, right, capacity, 0)


def apply_coin(state: WalkerState, coin: CoinOperator) -> WalkerState:
    c = coin.entries
    left = c[0, 0] * state.psi_left + c[0, 1] * state.psi_right
    right = c[1, 0] * state.psi_left + c[1, 1] * state.psi_right
    return WalkerState(left, right, state.origin_index, state.time)


def shift(state: WalkerState, ell: int) -> WalkerState:
    """Translate psi_R by +ell and psi_L by -ell.

    Raises
    ------
    CapacityExceededError
        If nonzero amplitude would leave the stored window.
    """
    ell = int(ell)
    if ell < 1:
        raise ValueError(f"step length must be >= 1, got {ell}")
    size = state.psi_left.size
    if ell >= size:
        if np.any(state.psi_left) or np.any(state.psi_right):
            raise CapacityExceededError(f"shift {ell} exceeds lattice of {size} sites")
    if np.any(state.psi_left[:ell]) or np.any(state.psi_right[size - ell :]):
        raise CapacityExceededError(
            f"shift by {ell} at t={state.time} leaves the window "
            f"[-{state.origin_index}, {size - 1 - state.origin_index}]"
        )
    left = np.zeros_like(state.psi_left)
    right = np.zeros_like(state.psi_right)
    left[: size - ell] = state.psi_left[ell:]
    right[ell:] = state.psi_right[: size - ell]
    return WalkerState(left, right, state.origin_index, state.time)


def step(state: WalkerState, coin: CoinOperator, ell: int) -> WalkerState:
    """One tick: coin at every site, then the conditional shift by ``ell``."""
    out = shift(apply_coin(state, coin), ell)
    out.time = state.time + 1
    return out


def occupation(state: WalkerState) -> Density:
    values = state.psi_left.real**2 + state.psi_left.imag**2
    values += state.psi_right.real**2 + state.psi_right.imag**2
    return Density(values, state.origin_index, state.time)
