"""
Decay of the central region away from the origin.

Tails are fitted in the central scaling coordinates u = x / sqrt(t) and
y = sqrt(t) f(x, t) on the x > 0 side. A power law y ~ u**slope is tried
first on u in [1, cutoff]; if it leaves a log-space RMS residual above
``rms_threshold`` a stretched exponential y = A exp(-c u**g) is fitted
instead by damped Gauss-Newton.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, check_X_y

from ..core import Density
from .fits import PowerLawRegressor

__all__ = ["StretchedExponentialRegressor", "TailFit", "fit_tail", "tail_cutoff", "tail_points"]


class StretchedExponentialRegressor(RegressorMixin, BaseEstimator):
    """y = prefactor * exp(-rate * u**exponent), least squares on log y.

    Parameters
    ----------
    max_iter : int
    tol : float
        Convergence when the accepted step has norm below ``tol``.

    Attributes
    ----------
    prefactor_, rate_, exponent_ : float
    log_rms_ : float
    n_iter_ : int
    """

    def __init__(self, max_iter=200, tol=1e-10):
        self.max_iter = max_iter
        self.tol = tol

    @staticmethod
    def _residual(p, u, ly):
        return ly - (p[0] - p[1] * u ** p[2])

    @staticmethod
    def _initial(u, ly):
        # ln(ln A - ln y) = ln c + g ln u is linear once A is fixed; scan A
        lu = np.log(u)
        best = None
        for lift in (0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0):
            la = ly.max() + lift
            z = np.log(la - ly)
            design = np.column_stack([np.ones_like(lu), lu])
            (lc, g), *_ = np.linalg.lstsq(design, z, rcond=None)
            p = np.array([la, math.exp(lc), g])
            cost = np.sum(StretchedExponentialRegressor._residual(p, u, ly) ** 2)
            if np.isfinite(cost) and (best is None or cost < best[0]):
                best = (cost, p)
        return best[1]

    def fit(self, X, y):
        u, y = check_X_y(np.asarray(X, dtype=float).reshape(-1, 1), y, y_numeric=True)
        u = u[:, 0]
        if np.any(u <= 0) or np.any(y <= 0):
            raise ValueError("stretched-exponential fit needs positive u and y")
        if u.size < 3:
            raise ValueError("need at least 3 points")
        ly = np.log(y)
        p = self._initial(u, ly)
        r = self._residual(p, u, ly)
        cost = r @ r
        self.n_iter_ = 0
        for it in range(1, self.max_iter + 1):
            self.n_iter_ = it
            ug = u ** p[2]
            jac = np.column_stack([-np.ones_like(u), ug, p[1] * ug * np.log(u)])
            delta, *_ = np.linalg.lstsq(jac, -r, rcond=None)
            lam = 1.0
            accepted = False
            while lam > 1e-12:
                trial = p + lam * delta
                if trial[1] > 0:
                    rt = self._residual(trial, u, ly)
                    ct = rt @ rt
                    if np.isfinite(ct) and ct <= cost:
                        accepted = True
                        break
                lam *= 0.5
            if not accepted:
                break
            step = lam * delta
            p, r, cost = trial, rt, ct
            if np.linalg.norm(step) < self.tol:
                break
        self.prefactor_ = float(math.exp(p[0]))
        self.rate_ = float(p[1])
        self.exponent_ = float(p[2])
        self.log_rms_ = float(math.sqrt(cost / u.size))
        return self

    def predict(self, X):
        check_is_fitted(self, "rate_")
        u = np.asarray(X, dtype=float).ravel()
        return self.prefactor_ * np.exp(-self.rate_ * u**self.exponent_)


@dataclass
class TailFit:
    """Outcome of :func:`fit_tail`; ``kind`` is ``"power_law"`` or ``"stretched_exponential"``."""

    kind: str
    valid_range: tuple[float, float]
    log_rms: float
    slope: float = float("nan")
    amplitude: float = float("nan")
    prefactor: float = float("nan")
    rate: float = float("nan")
    exponent: float = float("nan")
    power_law_slope: float = float("nan")
    power_law_log_rms: float = float("nan")


def tail_points(density: Density) -> tuple[np.ndarray, np.ndarray]:
    """(u, y) = (x / sqrt t, sqrt t f) for x > 0 with f > 0."""
    root = math.sqrt(density.time)
    x = density.positions
    keep = (x > 0) & (density.values > 0)
    return x[keep] / root, density.values[keep] * root


def tail_cutoff(
    u: np.ndarray,
    y: np.ndarray,
    floor: float = 1e-6,
    curvature_threshold: float = 5.0,
    bins_per_decade: int = 20,
    root_t: float = 1.0,
) -> float:
    """Largest u (from 1 outward) before the decay stops being a clean tail.

    Points are averaged in logarithmic bins of u (which also removes
    lattice-parity oscillation). Walking outward, the tail ends at the
    first bin whose mean f = y / root_t drops below ``floor``, whose local
    log-log slope turns nonnegative, or whose upward curvature exceeds
    ``curvature_threshold``.
    """
    sel = u >= 1.0
    u, y = u[sel], y[sel]
    if u.size == 0:
        return 1.0
    n_bins = max(2, int(math.ceil(bins_per_decade * math.log10(u.max() / 1.0 + 1e-12))) + 1)
    edges = np.geomspace(1.0, u.max() * (1 + 1e-12), n_bins + 1)
    idx = np.clip(np.searchsorted(edges, u, side="right") - 1, 0, n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    filled = counts > 0
    bu = np.exp(np.bincount(idx, np.log(u), n_bins)[filled] / counts[filled])
    by = np.bincount(idx, y, n_bins)[filled] / counts[filled]
    lu, ly = np.log(bu), np.log(by)
    cutoff = float(bu[0])
    for k in range(1, bu.size):
        if by[k] / root_t < floor:
            break
        slope = (ly[k] - ly[k - 1]) / (lu[k] - lu[k - 1])
        if slope >= 0:
            break
        if k >= 2:
            prev = (ly[k - 1] - ly[k - 2]) / (lu[k - 1] - lu[k - 2])
            curv = (slope - prev) / (0.5 * (lu[k] - lu[k - 2]))
            if curv > curvature_threshold:
                break
        cutoff = float(bu[k])
    return cutoff


def fit_tail(
    density: Density,
    rms_threshold: float = 0.2,
    cutoff: float | None = None,
    floor: float = 1e-6,
    curvature_threshold: float = 5.0,
    min_span: float = 2.0,
) -> TailFit:
    """Classify and fit the decay of f for x / sqrt(t) > 1.

    Raises
    ------
    ValueError
        If the clean tail ends before x/sqrt(t) = ``min_span``, if fewer
        than 4 positive points fall in the fit range, or if the
        power law is poor and the stretched-exponential exponent leaves (0, 1).
    """
    u, y = tail_points(density)
    root = math.sqrt(density.time)
    if cutoff is None:
        cutoff = tail_cutoff(u, y, floor, curvature_threshold, root_t=root)
    if cutoff < min_span:
        raise ValueError(f"tail region ends at x/sqrt(t) = {cutoff:.3g}, below {min_span}")
    sel = (u >= 1.0) & (u <= cutoff)
    if sel.sum() < 4:
        raise ValueError(f"only {int(sel.sum())} positive points with 1 <= x/sqrt(t) <= {cutoff}")
    u, y = u[sel], y[sel]
    span = (float(u.min()), float(u.max()))
    pl = PowerLawRegressor().fit(u, y)
    if pl.log_rms_ <= rms_threshold:
        return TailFit(
            "power_law",
            span,
            pl.log_rms_,
            slope=pl.exponent_,
            amplitude=pl.amplitude_,
            power_law_slope=pl.exponent_,
            power_law_log_rms=pl.log_rms_,
        )
    se = StretchedExponentialRegressor().fit(u, y)
    if not 0.0 < se.exponent_ < 1.0:
        raise ValueError(
            f"neither form describes the tail: power-law log-RMS {pl.log_rms_:.3g}, "
            f"stretched exponent {se.exponent_:.3g} outside (0, 1)"
        )
    return TailFit(
        "stretched_exponential",
        span,
        se.log_rms_,
        prefactor=se.prefactor_,
        rate=se.rate_,
        exponent=se.exponent_,
        power_law_slope=pl.exponent_,
        power_law_log_rms=pl.log_rms_,
    )
