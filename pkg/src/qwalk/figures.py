"""Smallest runs that regenerate the data behind each of the ten standard figures.

Each driver takes the parsed ``figures`` arguments, the master seed and an
output directory, writes plot-ready CSVs (header row, one column per
series) and returns ``(paths, metadata)``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .analysis import (
    Region,
    decoherence_power_laws,
    export_collapse,
    estimate_slope,
    fit_moment_forms,
    fit_tail,
    sweep_alpha,
)
from .analysis.tails import tail_points
from .ensemble import RunConfig, check_memory, run_ensemble
from .output import write_columns, write_table
from .schedules import Periodic, RandomTwoPoint, StepSchedule, format_schedule

PERIODIC_2 = [(1, 2), (1, 4), (1, 8)]
PERIODIC_3 = [(1, 2, 4), (1, 2, 8), (1, 4, 8)]


def _run(args, seed, schedule: StepSchedule, t_max: int, snapshots=None):
    check_memory(t_max, schedule.l_max)
    random = isinstance(schedule, RandomTwoPoint) and schedule.is_random
    config = RunConfig(
        schedule=schedule,
        t_max=t_max,
        # deterministic schedules need a single realization
        n_realizations=args.realizations if random else 1,
        master_seed=seed,
        snapshot_times=snapshots,
    )
    return run_ensemble(config, threads=args.threads)


COLLAPSE_REGIONS = {
    "all": None,
    "central": Region(0.5, 0.0, 1.0),
    "ballistic": Region(1.0, 0.3),
}


def write_collapses(out: Path, stem: str, densities, gammas, bins=200) -> list[Path]:
    """Long-format (t, scaled_x, scaled_f) file per gamma plus a spread table per region."""
    paths, quality = [], []
    for g in gammas:
        exp = export_collapse(densities, g, bins=bins)
        rows = []
        for t, curve in zip(exp.times, exp.curves):
            rows.extend((t, sx, sf) for sx, sf in curve)
        paths.append(write_table(out / f"{stem}_gamma{g:g}.csv", ["t", "scaled_x", "scaled_f"], rows))
        for name, region in COLLAPSE_REGIONS.items():
            quality.append((g, name, export_collapse(densities, g, region, bins).spread))
    paths.append(write_table(out / f"{stem}_quality.csv", ["gamma", "region", "spread"], quality))
    return paths


def _label(alpha: float) -> str:
    return f"alpha{alpha:g}"


def _padded(densities, half: int) -> dict:
    """Densities on the common window [-half, half]."""
    cols = {"x": np.arange(-half, half + 1)}
    for name, d in densities.items():
        v = np.zeros(2 * half + 1)
        lo = half - d.origin_index
        v[lo : lo + d.values.size] = d.values
        cols[name] = v
    return cols


def _n(args, default=1) -> int:
    return args.n if args.n is not None else default


def fig1(args, seed, out: Path):
    t = args.tmax or 1024
    n = _n(args)
    dens = {}
    for alpha in (0.5, 0.995, 1.0):
        res = _run(args, seed, RandomTwoPoint(alpha, n), t, (t,))
        dens[f"f_{_label(alpha)}"] = res.density_at(t)
    paths = [write_columns(out / "fig1_density.csv", _padded(dens, 2**n * t))]
    return paths, {"t": t, "n": n}


def fig2(args, seed, out: Path):
    t = args.tmax or 4096
    n = _n(args)
    paths, params = [], []
    for alpha in (0.5, 0.995):
        res = _run(args, seed, RandomTwoPoint(alpha, n), t, (t,))
        m = res.moments
        fit = fit_moment_forms(m)
        ticks = m.t[1:]
        paths.append(
            write_columns(
                out / f"fig2_moments_{_label(alpha)}.csv",
                {
                    "t": ticks,
                    "mean": m.mean[1:],
                    "mean_fit": fit.predict_mean(ticks),
                    "second_moment": m.second_moment[1:],
                    "second_moment_fit": fit.predict_second_moment(ticks),
                },
            )
        )
        params.append(
            (alpha, fit.b1, fit.b2, fit.b3, fit.b4, fit.relative_residual_max, *fit.fit_window)
        )
    paths.append(
        write_table(
            out / "fig2_fit.csv",
            ["alpha", "b1", "b2", "b3", "b4", "relative_residual_max", "fit_t_min", "fit_t_max"],
            params,
        )
    )
    return paths, {"t_max": t, "n": n}


def fig3(args, seed, out: Path):
    t = args.tmax or 2048
    n = _n(args)
    cols = {"t": np.arange(t + 1)}
    for alpha in (0.5, 0.6, 0.7, 0.8, 0.9):
        res = _run(args, seed, RandomTwoPoint(alpha, n), t, (t,))
        cols[f"x2_{_label(alpha)}"] = res.moments.second_moment
    return [write_columns(out / "fig3_second_moment.csv", cols)], {"t_max": t, "n": n}


def _collapse_figure(args, seed, out, stem, n, alphas_times):
    paths = []
    for alpha, times in alphas_times:
        res = _run(args, seed, RandomTwoPoint(alpha, n), max(times), tuple(times))
        dens = [res.density_at(s) for s in times]
        paths += write_collapses(out, f"{stem}_{_label(alpha)}", dens, (0.5, 1.0))
    return paths


def fig4(args, seed, out: Path):
    t = args.tmax or 4096
    alpha = args.alpha if args.alpha is not None else 0.5
    times = [t // 8, t // 4, t // 2, t]
    paths = _collapse_figure(args, seed, out, "fig4", _n(args), [(alpha, times)])
    return paths, {"alpha": alpha, "times": ",".join(map(str, times))}


def fig5(args, seed, out: Path):
    t = args.tmax or 4096
    n = _n(args)
    alphas = [0.9, 0.95, 0.98, 0.99, 0.995]
    base = RunConfig(RandomTwoPoint(0.9, n), t, args.realizations, seed)
    rows = sweep_alpha(base, alphas, threads=args.threads)
    paths = [
        write_table(
            out / "fig5_decoherence.csv",
            ["alpha", "one_minus_alpha", "b2", "b4"],
            [(r.alpha, 1.0 - r.alpha, r.b2, r.b4) for r in rows],
        )
    ]
    laws = decoherence_power_laws(rows)
    paths.append(
        write_table(
            out / "fig5_powerlaw.csv",
            ["parameter", "amplitude", "beta", "residual"],
            [(k, f.amplitude, f.exponent, f.residual) for k, f in laws.items()],
        )
    )
    return paths, {"t_max": t, "n": n, "alphas": ",".join(map(str, alphas))}


def fig6(args, seed, out: Path):
    t = args.tmax or 4096
    n = _n(args)
    rows, fits = [], []
    for alpha in (0.5, 0.7, 0.9, 0.995, 0.999):
        d = _run(args, seed, RandomTwoPoint(alpha, n), t, (t,)).density_at(t)
        u, y = tail_points(d)
        rows.extend((alpha, a, b) for a, b in zip(u, y))
        try:
            fit = fit_tail(d)
        except ValueError:
            # no clean tail at this alpha and t; keep the row so columns line up
            fits.append((alpha, "unfit") + (float("nan"),) * 8)
            continue
        fits.append(
            (alpha, fit.kind, fit.slope, fit.amplitude, fit.prefactor, fit.rate, fit.exponent,
             fit.log_rms, *fit.valid_range)
        )
    paths = [
        write_table(out / "fig6_tail.csv", ["alpha", "x_over_sqrt_t", "sqrt_t_f"], rows),
        write_table(
            out / "fig6_fits.csv",
            ["alpha", "kind", "slope", "amplitude", "prefactor", "rate", "exponent", "log_rms",
             "u_min", "u_max"],
            fits,
        ),
    ]
    return paths, {"t": t, "n": n}


def fig7(args, seed, out: Path):
    t = args.tmax or 1024
    n = _n(args, 3)
    plan = [(0.5, [t // 8, t // 4, t // 2, t]), (0.995, [t // 2, t])]
    return _collapse_figure(args, seed, out, "fig7", n, plan), {"t_max": t, "n": n}


def fig8(args, seed, out: Path):
    t = args.tmax or 1024
    paths, slopes = [], []
    for n in (2, 3):
        cols = {"t": np.arange(t + 1)}
        for alpha in (0.5, 0.9, 0.99, 0.999):
            m = _run(args, seed, RandomTwoPoint(alpha, n), t, (t,)).moments
            cols[f"x2_{_label(alpha)}"] = m.second_moment
            early = estimate_slope(m, "second_moment", (8, min(64, t)))
            late = estimate_slope(m, "second_moment", (max(1, t // 4), t))
            slopes.append((n, alpha, early, late))
        paths.append(write_columns(out / f"fig8_second_moment_n{n}.csv", cols))
    paths.append(write_table(out / "fig8_slopes.csv", ["n", "alpha", "slope_early", "slope_late"], slopes))
    return paths, {"t_max": t}


def fig9(args, seed, out: Path):
    t = args.tmax or 512
    paths = []
    for stem, group in (("periodicity2", PERIODIC_2), ("periodicity3", PERIODIC_3)):
        dens = {}
        for lengths in [(1, 2)] + [g for g in group if g != (1, 2)]:
            sched = Periodic(lengths)
            dens["f_" + "_".join(map(str, lengths))] = _run(args, seed, sched, t, (t,)).density_at(t)
        half = max(d.origin_index for d in dens.values())
        paths.append(write_columns(out / f"fig9_density_{stem}.csv", _padded(dens, half)))
    return paths, {"t": t}


def fig10(args, seed, out: Path):
    t = args.tmax or 1024
    paths, slopes = [], []
    for stem, group in (("periodicity2", PERIODIC_2), ("periodicity3", PERIODIC_3)):
        cols = {"t": np.arange(t + 1)}
        for lengths in group:
            sched = Periodic(lengths)
            m = _run(args, seed, sched, t, (t,)).moments
            cols["x2_" + "_".join(map(str, lengths))] = m.second_moment
            window = (min(64, max(1, t // 16)), t)
            slopes.append((format_schedule(sched), estimate_slope(m, "second_moment", window), *window))
        paths.append(write_columns(out / f"fig10_second_moment_{stem}.csv", cols))
    paths.append(write_table(out / "fig10_slopes.csv", ["schedule", "slope_x2", "t_min", "t_max"], slopes))
    return paths, {"t_max": t}


FIGURES = {f"fig{k}": globals()[f"fig{k}"] for k in range(1, 11)}
