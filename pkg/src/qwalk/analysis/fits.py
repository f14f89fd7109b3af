"""
Regressors for the moment forms, power laws and log-log slopes.

The moment forms

    <x>   = t   / (b1 + b2 sqrt(t))
    <x^2> = t^2 / (b3 + b4 sqrt(t))

become straight lines in sqrt(t) after the transform t^p / y, so both are
fitted by ordinary least squares on the transformed data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, check_X_y, column_or_1d

from ..ensemble import MomentSeries

__all__ = [
    "FitDegenerateError",
    "MomentFit",
    "MomentFormRegressor",
    "PowerLawFit",
    "PowerLawRegressor",
    "default_fit_window",
    "default_slope_window",
    "estimate_slope",
    "fit_moment_forms",
    "fit_power_law",
]


class FitDegenerateError(ValueError):
    """The data cannot be put into the linearized form on the requested window."""


def _line(x, y):
    """Least-squares (intercept, slope) of y against x."""
    design = np.column_stack([np.ones_like(x), x])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(a), float(b)


def _as_1d(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single feature column, got shape {X.shape}")
        X = X[:, 0]
    return column_or_1d(X)


class MomentFormRegressor(RegressorMixin, BaseEstimator):
    """Fit y(t) = t**power / (intercept + coef * sqrt(t)).

    Parameters
    ----------
    power : {1, 2}
        1 for the first moment, 2 for the second.

    Attributes
    ----------
    intercept_, coef_ : float
        (b1, b2) for power 1, (b3, b4) for power 2.
    """

    def __init__(self, power=2):
        self.power = power

    def fit(self, X, y):
        t = _as_1d(X)
        t, y = check_X_y(t[:, None], y, ensure_2d=True, y_numeric=True)
        t = t[:, 0]
        if np.any(t <= 0):
            raise ValueError("times must be positive")
        if np.any(y == 0) or (np.any(y > 0) and np.any(y < 0)):
            raise FitDegenerateError("moment vanishes or changes sign inside the fit window")
        self.intercept_, self.coef_ = _line(np.sqrt(t), t**self.power / y)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        t = _as_1d(X)
        return t**self.power / (self.intercept_ + self.coef_ * np.sqrt(t))


class PowerLawRegressor(RegressorMixin, BaseEstimator):
    """y = amplitude * x**exponent by least squares in log-log space."""

    def fit(self, X, y):
        x = _as_1d(X)
        x, y = check_X_y(x[:, None], y, y_numeric=True)
        x = x[:, 0]
        if np.any(x <= 0) or np.any(y <= 0):
            raise ValueError("power-law fit needs strictly positive x and y")
        if x.size < 2:
            raise ValueError("power-law fit needs at least 2 points")
        lx, ly = np.log(x), np.log(y)
        log_amp, self.exponent_ = _line(lx, ly)
        self.amplitude_ = float(np.exp(log_amp))
        resid = ly - (log_amp + self.exponent_ * lx)
        self.log_rms_ = float(np.sqrt(np.mean(resid**2)))
        return self

    def predict(self, X):
        check_is_fitted(self, "exponent_")
        return self.amplitude_ * _as_1d(X) ** self.exponent_


@dataclass
class MomentFit:
    b1: float
    b2: float
    b3: float
    b4: float
    relative_residual_max: float
    fit_window: tuple[int, int]
    mean_residual_max: float = float("nan")
    second_residual_max: float = float("nan")
    # <x> is fitted as |<x>|; this records which way the walk drifts
    mean_sign: int = 1

    def predict_mean(self, t):
        t = np.asarray(t, dtype=float)
        return self.mean_sign * t / (self.b1 + self.b2 * np.sqrt(t))

    def predict_second_moment(self, t):
        t = np.asarray(t, dtype=float)
        return t**2 / (self.b3 + self.b4 * np.sqrt(t))


FIT_START = 64


def default_fit_window(series: MomentSeries) -> tuple[int, int]:
    """[64, t_max]: before t ~ 50 the walk has not yet settled into the moment forms."""
    t_max = int(series.t[-1])
    return min(FIT_START, max(1, t_max // 4)), t_max


def default_slope_window(series: MomentSeries) -> tuple[int, int]:
    """The last decade of t."""
    t_max = int(series.t[-1])
    return max(1, t_max // 10), t_max


def _max_rel(pred, data):
    return float(np.max(np.abs(pred - data) / np.abs(data)))


def fit_moment_forms(series: MomentSeries, window: tuple[int, int] | None = None) -> MomentFit:
    """Fit both moment forms on ``window`` (default t in [64, t_max]).

    Raises
    ------
    FitDegenerateError
        If <x> vanishes or changes sign inside the window.
    """
    window = default_fit_window(series) if window is None else tuple(int(v) for v in window)
    w = series.window(*window)
    if w.t.size < 10:
        raise ValueError(f"fit window {window} holds {w.t.size} ticks; need at least 10")
    mean, second = w.mean, w.second_moment
    if np.any(mean == 0) or (np.any(mean > 0) and np.any(mean < 0)):
        raise FitDegenerateError(f"<x> crosses zero inside window {window}; shrink the window")
    sign = 1 if mean[0] > 0 else -1
    first = MomentFormRegressor(power=1).fit(w.t, np.abs(mean))
    sec = MomentFormRegressor(power=2).fit(w.t, second)
    r1 = _max_rel(first.predict(w.t), np.abs(mean))
    r2 = _max_rel(sec.predict(w.t), second)
    return MomentFit(
        b1=first.intercept_,
        b2=first.coef_,
        b3=sec.intercept_,
        b4=sec.coef_,
        relative_residual_max=max(r1, r2),
        fit_window=window,
        mean_residual_max=r1,
        second_residual_max=r2,
        mean_sign=sign,
    )


@dataclass
class PowerLawFit:
    amplitude: float
    exponent: float
    fit_range: tuple[float, float]
    residual: float


def fit_power_law(points) -> PowerLawFit:
    """Fit b = amplitude * (1 - alpha)**exponent to (one_minus_alpha, b) pairs."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be a sequence of (one_minus_alpha, value) pairs")
    if pts.shape[0] < 4:
        raise ValueError(f"need at least 4 points, got {pts.shape[0]}")
    if np.any(pts <= 0):
        raise ValueError("all abscissae and values must be positive")
    reg = PowerLawRegressor().fit(pts[:, 0], pts[:, 1])
    return PowerLawFit(
        reg.amplitude_, reg.exponent_, (float(pts[:, 0].min()), float(pts[:, 0].max())), reg.log_rms_
    )


def estimate_slope(
    series: MomentSeries, quantity: str = "second_moment", window: tuple[int, int] | None = None
) -> float:
    """Log-log slope of a moment against t; ``mean`` uses |<x>|."""
    window = default_slope_window(series) if window is None else window
    w = series.window(*window)
    y = w.quantity(quantity)
    if quantity == "mean":
        y = np.abs(y)
    if w.t.size < 2:
        raise ValueError(f"slope window {window} holds fewer than 2 ticks")
    if np.any(y <= 0) or np.any(w.t <= 0):
        raise ValueError(f"{quantity} is not positive on window {window}")
    return PowerLawRegressor().fit(w.t, y).exponent_
