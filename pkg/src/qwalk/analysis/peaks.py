"""Ballistic and central peaks of a density snapshot."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import Density

__all__ = ["PeakReport", "ReportEmptyError", "locate_peaks", "predicted_peak"]


class ReportEmptyError(ValueError):
    """No local maximum exists on one side of the central region."""


def predicted_peak(alpha: float, t: int, n: int = 1) -> float:
    """|x| of the ballistic peaks for a weighted mix of ell=1 and ell=2**n walks.

    For n=1 this is (2 - alpha) t / sqrt(2).
    """
    mean_len = alpha + (1.0 - alpha) * 2**n
    return mean_len * t / math.sqrt(2.0)


@dataclass
class PeakReport:
    right_peak_x: int
    left_peak_x: int
    predicted: float
    central_peak_height: float
    plateau_height: float
    time: int

    @property
    def right_error(self) -> float:
        return abs(self.right_peak_x - self.predicted) / self.predicted

    @property
    def left_error(self) -> float:
        return abs(-self.left_peak_x - self.predicted) / self.predicted

    @property
    def has_central_peak(self) -> bool:
        return self.central_peak_height > self.plateau_height


def _smooth(f: np.ndarray) -> np.ndarray:
    """[1, 2, 1] / 4 filter: cancels even/odd site alternation, symmetric under x -> -x."""
    padded = np.concatenate([[0.0], f, [0.0]])
    return 0.25 * padded[:-2] + 0.5 * padded[1:-1] + 0.25 * padded[2:]


def _outermost_peak(x: np.ndarray, g: np.ndarray, mask: np.ndarray, prominence: float) -> int:
    """Index of the local maximum of g inside mask that is farthest from the origin
    among those reaching ``prominence`` times the largest value in mask."""
    padded = np.concatenate([[-np.inf], g, [-np.inf]])
    is_max = (g > 0) & (g >= padded[:-2]) & (g >= padded[2:]) & mask
    if not is_max.any():
        raise ReportEmptyError("no local maximum outside the central region")
    floor = prominence * g[mask].max()
    idx = np.flatnonzero(is_max & (g >= floor))
    return int(idx[np.argmax(np.abs(x[idx]))])


def locate_peaks(
    density: Density, alpha: float, n: int = 1, prominence: float = 0.01
) -> PeakReport:
    """Find the ballistic peaks outside |x| < sqrt(t) and the central peak inside.

    The density is first smoothed with a symmetric [1, 2, 1] / 4 filter so
    that lattice-parity alternation does not create spurious maxima. On each
    side the ballistic peak is then the outermost local maximum with
    |x| >= sqrt(t) whose height is at least ``prominence`` times the largest
    smoothed value on that side; the exponentially small far tail never
    qualifies. The plateau height is the largest value strictly
    between the central region and half-way to the ballistic peaks, so
    ``has_central_peak`` tells whether the centre stands above it.
    """
    t = density.time
    x = density.positions
    f = density.values
    root = math.sqrt(t)
    g = _smooth(f)
    right = _outermost_peak(x, g, x >= root, prominence)
    left = _outermost_peak(x, g, x <= -root, prominence)
    central = float(f[np.abs(x) <= root].max())
    reach = 0.5 * min(x[right], -x[left])
    between = (np.abs(x) > root) & (np.abs(x) < reach)
    plateau = float(f[between].max()) if between.any() else 0.0
    return PeakReport(
        right_peak_x=int(x[right]),
        left_peak_x=int(x[left]),
        predicted=predicted_peak(alpha, t, n),
        central_peak_height=central,
        plateau_height=plateau,
        time=t,
    )
