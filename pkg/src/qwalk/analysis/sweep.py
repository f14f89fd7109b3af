"""Scan the disorder parameter alpha and extract the decoherence parameters."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..ensemble import RunConfig, run_ensemble
from ..schedules import RandomTwoPoint
from .fits import PowerLawFit, estimate_slope, fit_moment_forms, fit_power_law

__all__ = ["SweepRow", "alpha_seed", "decoherence_power_laws", "sweep_alpha"]


@dataclass
class SweepRow:
    alpha: float
    b1: float
    b2: float
    b3: float
    b4: float
    slope_x2: float
    x2_at_tmax: float
    residual: float
    min_flag: bool = False
    max_norm_error: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


def alpha_seed(master_seed: int, index: int) -> int:
    """Independent 63-bit seed for the index-th alpha of a sweep."""
    ss = np.random.SeedSequence(entropy=int(master_seed) & ((1 << 64) - 1), spawn_key=(0x5EE9, index))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def sweep_alpha(
    base: RunConfig,
    alphas,
    threads: int | None = None,
    fit_window: tuple[int, int] | None = None,
    slope_window: tuple[int, int] | None = None,
) -> list[SweepRow]:
    """One independent ensemble per alpha; flags the alpha with the smallest <x^2>(t_max).

    ``base`` supplies n (through its schedule, if random), coin, spinor,
    t_max, realization count and master seed.
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("alpha list is empty")
    if any(not 0.0 < a < 1.0 for a in alphas):
        raise ValueError(f"alphas must lie strictly inside (0, 1): {alphas}")
    if alphas != sorted(alphas):
        raise ValueError("alphas must be sorted")
    n = base.schedule.n if isinstance(base.schedule, RandomTwoPoint) else 1
    rows = []
    for i, alpha in enumerate(alphas):
        cfg = base.replace(
            schedule=RandomTwoPoint(alpha, n),
            master_seed=alpha_seed(base.master_seed, i),
            snapshot_times=(base.t_max,),
        )
        result = run_ensemble(cfg, threads=threads)
        moments = result.moments
        fit = fit_moment_forms(moments, fit_window)
        rows.append(
            SweepRow(
                alpha=alpha,
                b1=fit.b1,
                b2=fit.b2,
                b3=fit.b3,
                b4=fit.b4,
                slope_x2=estimate_slope(moments, "second_moment", slope_window),
                x2_at_tmax=float(moments.second_moment[-1]),
                residual=fit.relative_residual_max,
                max_norm_error=result.max_norm_error,
            )
        )
    best = int(np.argmin([r.x2_at_tmax for r in rows]))
    rows[best].min_flag = True
    return rows


def decoherence_power_laws(rows: list[SweepRow]) -> dict[str, PowerLawFit]:
    """Fit b2 and b4 against (1 - alpha) as power laws."""
    out = {}
    for name in ("b2", "b4"):
        out[name] = fit_power_law([(1.0 - r.alpha, getattr(r, name)) for r in rows])
    return out
