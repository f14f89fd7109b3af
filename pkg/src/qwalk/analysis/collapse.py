"""Scaling collapse of density snapshots: t**gamma f(x, t) against x / t**gamma."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Density

__all__ = ["CollapseExport", "Region", "collapse_spread", "export_collapse"]


@dataclass(frozen=True)
class Region:
    """Sites with lo <= |x| / t**exponent < hi."""

    exponent: float
    lo: float = 0.0
    hi: float = np.inf

    def mask(self, x: np.ndarray, t: int) -> np.ndarray:
        s = np.abs(x) / float(t) ** self.exponent
        return (s >= self.lo) & (s < self.hi)


@dataclass
class CollapseExport:
    gamma: float
    times: list[int]
    curves: list[np.ndarray]
    spread: float
    region: Region | None = None


def _scaled(d: Density, gamma: float) -> np.ndarray:
    s = float(d.time) ** gamma
    return np.column_stack([d.positions / s, d.values * s])


def collapse_spread(curves, masks, bins: int = 200) -> float:
    """Mean squared vertical spread of curves binned onto a shared scaled-x grid.

    Each curve is averaged within every bin; over bins occupied by at least
    two curves, the across-curve variance is averaged and divided by the
    mean squared bin height. The normalization makes scores for different
    gamma comparable. Identical curves give 0.
    """
    pts = [c[m] for c, m in zip(curves, masks)]
    xs = np.concatenate([p[:, 0] for p in pts])
    if xs.size == 0:
        return float("nan")
    lo, hi = xs.min(), xs.max()
    if hi <= lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, bins + 1)
    table = np.full((len(pts), bins), np.nan)
    for k, p in enumerate(pts):
        idx = np.clip(np.searchsorted(edges, p[:, 0], side="right") - 1, 0, bins - 1)
        sums = np.bincount(idx, weights=p[:, 1], minlength=bins)
        counts = np.bincount(idx, minlength=bins)
        filled = counts > 0
        table[k, filled] = sums[filled] / counts[filled]
    present = np.sum(~np.isnan(table), axis=0)
    usable = present >= 2
    if not usable.any():
        return float("nan")
    sub = table[:, usable]
    mu = np.nanmean(sub, axis=0)
    var = np.nanvar(sub, axis=0)
    scale = np.mean(mu**2)
    if scale == 0:
        return 0.0
    return float(np.mean(var) / scale)


def export_collapse(
    densities: list[Density],
    gamma: float,
    region: Region | None = None,
    bins: int = 200,
) -> CollapseExport:
    """Rescale every snapshot and score how well they fall on one curve.

    ``curves`` keep every source point; ``region`` only restricts which
    points enter the spread score.
    """
    if len(densities) < 2:
        raise ValueError("a collapse needs at least two snapshots")
    curves = [_scaled(d, gamma) for d in densities]
    if region is None:
        masks = [np.ones(d.values.size, dtype=bool) for d in densities]
    else:
        masks = [region.mask(d.positions, d.time) for d in densities]
    spread = collapse_spread(curves, masks, bins)
    return CollapseExport(float(gamma), [d.time for d in densities], curves, spread, region)
