from .collapse import CollapseExport, Region, collapse_spread, export_collapse
from .fits import (
    FitDegenerateError,
    MomentFit,
    MomentFormRegressor,
    PowerLawFit,
    PowerLawRegressor,
    estimate_slope,
    fit_moment_forms,
    fit_power_law,
)
from .peaks import PeakReport, ReportEmptyError, locate_peaks, predicted_peak
from .sweep import SweepRow, decoherence_power_laws, sweep_alpha
from .tails import StretchedExponentialRegressor, TailFit, fit_tail

__all__ = [
    "CollapseExport",
    "FitDegenerateError",
    "MomentFit",
    "MomentFormRegressor",
    "PeakReport",
    "PowerLawFit",
    "PowerLawRegressor",
    "Region",
    "ReportEmptyError",
    "StretchedExponentialRegressor",
    "SweepRow",
    "TailFit",
    "collapse_spread",
    "decoherence_power_laws",
    "estimate_slope",
    "export_collapse",
    "fit_moment_forms",
    "fit_power_law",
    "fit_tail",
    "locate_peaks",
    "predicted_peak",
    "sweep_alpha",
]
