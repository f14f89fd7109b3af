"""
Command-line front end.

    qwalk simulate --schedule random:alpha=0.5,n=1 --tmax 4096 --realizations 1000 --seed 42
    qwalk oracle   --mode exact --schedule random:alpha=0.5,n=1 --tmax 10
    qwalk oracle   --mode dense --sequence 1,2,1
    qwalk sweep    --alphas 0.5,0.6,0.7,0.8,0.9 --n 1 --tmax 2048
    qwalk fit      --input-dir out/
    qwalk collapse --input-dir out/ --gamma 0.5,1
    qwalk figures  fig4 --alpha 0.5

Every invocation writes ``run_meta.csv`` next to its outputs. Passing that
file back with ``--from-meta`` repeats the run with identical output.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    FitDegenerateError,
    decoherence_power_laws,
    estimate_slope,
    fit_moment_forms,
    sweep_alpha,
)
from .core import InitialSpinor, DEFAULT_SPINOR, init_state, step
from .ensemble import (
    DEFAULT_REALIZATIONS,
    RunConfig,
    check_memory,
    run_ensemble,
)
from .figures import FIGURES, write_collapses
from .oracle import DENSE_T_LIMIT, EXACT_T_LIMIT, dense_evolve, monte_carlo_comparison
from .output import (
    META_NAME,
    read_density,
    read_meta,
    read_moments,
    write_columns,
    write_density,
    write_meta,
    write_moments,
    write_table,
)
from .schedules import Constant, RandomTwoPoint, format_schedule, parse_schedule

CLI_MAX_N = 6
DEFAULT_SEED = 1
# flags that change where or how fast a run happens, never what it produces
_ENV_FLAGS = ("--threads", "--output-dir", "--from-meta")


class CliError(Exception):
    """Invalid request; reported on stderr with exit status 2."""


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _complex(text: str) -> complex:
    return complex(text.replace("i", "j"))


def _schedule(text: str):
    try:
        sched = parse_schedule(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if isinstance(sched, RandomTwoPoint) and sched.n > CLI_MAX_N:
        raise argparse.ArgumentTypeError(f"n is capped at {CLI_MAX_N} on the command line")
    return sched


SCHEDULE_HELP = (
    "step-length rule: 'random:alpha=A,n=N' (ell=1 with prob. A, else 2**N), "
    "'periodic:L1,L2,...' (cycle through the list) or 'constant:L'"
)


def _env_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--output-dir", type=Path, default=Path("."), help="where files are written")
    p.add_argument(
        "--threads",
        type=_positive_int,
        default=None,
        help="worker threads (default $QWALK_THREADS or 1); never changes the output",
    )
    p.add_argument("--from-meta", type=Path, default=None, help=f"repeat the run recorded in a {META_NAME}")
    return p


def _run_parent(schedule_required=True) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--schedule", type=_schedule, required=schedule_required, help=SCHEDULE_HELP)
    p.add_argument("--seed", type=int, default=None, help=f"master seed (default {DEFAULT_SEED})")
    p.add_argument("--a0", type=_complex, default=DEFAULT_SPINOR.a0, help="left amplitude at the origin")
    p.add_argument("--b0", type=_complex, default=DEFAULT_SPINOR.b0, help="right amplitude at the origin")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwalk",
        description="Quantum walks with random long-range steps: simulation and analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    env = _env_parent()

    p = sub.add_parser("simulate", parents=[_run_parent(), env], help="disorder-averaged run")
    p.add_argument("--tmax", type=_positive_int, required=True)
    p.add_argument("--realizations", type=_positive_int, default=DEFAULT_REALIZATIONS)
    p.add_argument("--snapshots", type=_int_list, default=None, help="comma-separated ticks (default powers of two)")

    p = sub.add_parser("oracle", parents=[_run_parent(schedule_required=False), env], help="brute-force checks")
    p.add_argument("--mode", choices=("exact", "dense"), required=True)
    p.add_argument("--tmax", type=_positive_int, default=10)
    p.add_argument("--mc-realizations", type=_positive_int, default=100_000)
    p.add_argument("--sequence", type=_int_list, default=None, help="step lengths for --mode dense")

    p = sub.add_parser("sweep", parents=[env], help="scan alpha, fit b1..b4")
    p.add_argument("--alphas", type=_float_list, required=True)
    p.add_argument("--n", type=_positive_int, default=1)
    p.add_argument("--tmax", type=_positive_int, default=2048)
    p.add_argument("--realizations", type=_positive_int, default=DEFAULT_REALIZATIONS)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--window", type=_int_list, default=None, help="fit window t_min,t_max")

    p = sub.add_parser("fit", parents=[env], help="fit moment forms to a moments.csv")
    p.add_argument("--input-dir", type=Path, required=True)
    p.add_argument("--window", type=_int_list, default=None, help="fit window t_min,t_max")
    p.add_argument("--slope-window", type=_int_list, default=None)

    p = sub.add_parser("collapse", parents=[env], help="rescale density snapshots")
    p.add_argument("--input-dir", type=Path, required=True)
    p.add_argument("--gamma", type=_float_list, default=[0.5, 1.0])
    p.add_argument("--times", type=_int_list, default=None)
    p.add_argument("--bins", type=_positive_int, default=200)

    p = sub.add_parser("figures", parents=[env], help="regenerate the data behind one figure")
    p.add_argument("figure", help="fig1 ... fig10")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--tmax", type=_positive_int, default=None)
    p.add_argument("--realizations", type=_positive_int, default=DEFAULT_REALIZATIONS)
    p.add_argument("--seed", type=int, default=None)
    return parser


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is None:
        print(f"qwalk: no --seed given, using default seed {DEFAULT_SEED}", file=sys.stderr)
        return DEFAULT_SEED
    return args.seed


def _spinor(args) -> InitialSpinor:
    try:
        return InitialSpinor(args.a0, args.b0)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _strip_env(argv: list[str]) -> list[str]:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok in _ENV_FLAGS:
            skip = True
            continue
        if any(tok.startswith(f + "=") for f in _ENV_FLAGS):
            continue
        out.append(tok)
    return out


def _meta(args, argv, extra: dict) -> dict:
    items = {
        "qwalk_version": __version__,
        "command": shlex.join(_strip_env(argv)),
        "subcommand": args.command,
    }
    items.update({k: v for k, v in extra.items()})
    return items


def cmd_simulate(args, argv) -> list[Path]:
    seed = _resolve_seed(args)
    sched = args.schedule
    check_memory(args.tmax, sched.l_max)
    snaps = args.snapshots
    if snaps is not None and (not snaps or min(snaps) < 0 or max(snaps) > args.tmax):
        raise CliError(f"--snapshots must lie within [0, {args.tmax}]")
    config = RunConfig(
        schedule=sched,
        t_max=args.tmax,
        n_realizations=args.realizations,
        master_seed=seed,
        spinor=_spinor(args),
        snapshot_times=None if snaps is None else tuple(snaps),
    )
    result = run_ensemble(config, threads=args.threads)
    out = args.output_dir
    paths = [write_density(out / f"density_t{d.time}.csv", d) for d in result.densities]
    paths.append(write_moments(out / "moments.csv", result.moments))
    paths.append(
        write_meta(
            out,
            _meta(
                args,
                argv,
                {
                    "schedule": format_schedule(sched),
                    "t_max": config.t_max,
                    "n_realizations": config.n_realizations,
                    "master_seed": seed,
                    "a0": repr(config.spinor.a0),
                    "b0": repr(config.spinor.b0),
                    "coin": "hadamard",
                    "snapshot_times": ",".join(map(str, config.snapshot_times)),
                    "max_norm_error": result.max_norm_error,
                },
            ),
        )
    )
    return paths


def cmd_oracle(args, argv) -> list[Path]:
    out = args.output_dir
    spinor = _spinor(args)
    if args.mode == "exact":
        sched = args.schedule or RandomTwoPoint(0.5, 1)
        if not isinstance(sched, RandomTwoPoint):
            raise CliError("exact mode needs a random:alpha=..,n=.. schedule")
        if args.tmax > EXACT_T_LIMIT:
            raise CliError(f"exact enumeration is limited to --tmax <= {EXACT_T_LIMIT}")
        seed = _resolve_seed(args)
        config = RunConfig(
            schedule=sched,
            t_max=args.tmax,
            n_realizations=args.mc_realizations,
            master_seed=seed,
            spinor=spinor,
        )
        cmp = monte_carlo_comparison(config, threads=args.threads)
        paths = [
            write_columns(
                out / f"oracle_exact_t{args.tmax}.csv",
                {
                    "x": cmp.x,
                    "exact": cmp.exact,
                    "monte_carlo": cmp.monte_carlo,
                    "std_error": cmp.std_error,
                    "z": cmp.z,
                },
            )
        ]
        report = {
            "max_abs_z": cmp.max_abs_z,
            "fraction_abs_z_above_2": cmp.fraction_above(2.0),
            "pass": cmp.max_abs_z < 4.0 and cmp.fraction_above(2.0) < 0.10,
        }
        extra = {"schedule": format_schedule(sched), "t_max": args.tmax, "master_seed": seed}
    else:
        if not args.sequence:
            raise CliError("dense mode needs --sequence L1,L2,...")
        seq = args.sequence
        if len(seq) > DENSE_T_LIMIT:
            raise CliError(f"dense oracle is limited to sequences of length <= {DENSE_T_LIMIT}")
        if min(seq) < 1:
            raise CliError("step lengths must be >= 1")
        sched = args.schedule or Constant(max(seq))
        config = RunConfig(schedule=sched, t_max=len(seq), n_realizations=1, spinor=spinor)
        dense = dense_evolve(config, seq)
        state = init_state(spinor, dense.origin_index)
        for ell in seq:
            state = step(state, config.coin, ell)
        dev = max(
            float(np.max(np.abs(dense.psi_left - state.psi_left))),
            float(np.max(np.abs(dense.psi_right - state.psi_right))),
        )
        paths = [
            write_columns(
                out / "oracle_dense.csv",
                {
                    "x": dense.positions,
                    "psi_left_re": dense.psi_left.real,
                    "psi_left_im": dense.psi_left.imag,
                    "psi_right_re": dense.psi_right.real,
                    "psi_right_im": dense.psi_right.imag,
                    "deviation": np.maximum(
                        np.abs(dense.psi_left - state.psi_left),
                        np.abs(dense.psi_right - state.psi_right),
                    ),
                },
            )
        ]
        report = {"max_amplitude_deviation": dev, "pass": dev < 1e-12}
        extra = {"sequence": ",".join(map(str, seq))}
    paths.append(write_table(out / "oracle_report.csv", ["metric", "value"], report.items()))
    extra.update({"mode": args.mode, "a0": repr(spinor.a0), "b0": repr(spinor.b0)})
    paths.append(write_meta(out, _meta(args, argv, extra)))
    for k, v in report.items():
        print(f"{k}: {v}")
    return paths


def cmd_sweep(args, argv) -> list[Path]:
    if not args.alphas:
        raise CliError("--alphas is empty")
    if args.n > CLI_MAX_N:
        raise CliError(f"n is capped at {CLI_MAX_N} on the command line")
    alphas = sorted(args.alphas)
    if any(not 0.0 < a < 1.0 for a in alphas):
        raise CliError("alphas must lie strictly between 0 and 1")
    check_memory(args.tmax, 2**args.n)
    seed = _resolve_seed(args)
    base = RunConfig(
        schedule=RandomTwoPoint(alphas[0], args.n),
        t_max=args.tmax,
        n_realizations=args.realizations,
        master_seed=seed,
    )
    window = tuple(args.window) if args.window else None
    rows = sweep_alpha(base, alphas, threads=args.threads, fit_window=window)
    out = args.output_dir
    header = ["alpha", "b1", "b2", "b3", "b4", "slope_x2", "x2_at_tmax", "residuals", "min_flag"]
    paths = [
        write_table(
            out / "sweep.csv",
            header,
            [
                (r.alpha, r.b1, r.b2, r.b3, r.b4, r.slope_x2, r.x2_at_tmax, r.residual, r.min_flag)
                for r in rows
            ],
        )
    ]
    if len(rows) >= 4 and all(r.b2 > 0 and r.b4 > 0 for r in rows):
        laws = decoherence_power_laws(rows)
        paths.append(
            write_table(
                out / "powerlaw.csv",
                ["parameter", "amplitude", "beta", "residual", "one_minus_alpha_min", "one_minus_alpha_max"],
                [
                    (name, f.amplitude, f.exponent, f.residual, f.fit_range[0], f.fit_range[1])
                    for name, f in laws.items()
                ],
            )
        )
    else:
        print("qwalk: fewer than 4 alphas with positive b2, b4; powerlaw.csv not written", file=sys.stderr)
    extra = {
        "alphas": ",".join(repr(a) for a in alphas),
        "n": args.n,
        "t_max": args.tmax,
        "n_realizations": args.realizations,
        "master_seed": seed,
    }
    paths.append(write_meta(out, _meta(args, argv, extra)))
    return paths


def cmd_fit(args, argv) -> list[Path]:
    src = args.input_dir / "moments.csv"
    if not src.exists():
        raise CliError(f"{src} not found")
    series = read_moments(src)
    window = tuple(args.window) if args.window else None
    slope_window = tuple(args.slope_window) if args.slope_window else None
    try:
        fit = fit_moment_forms(series, window)
    except FitDegenerateError as exc:
        raise CliError(str(exc)) from exc
    rows = [
        ("b1", fit.b1),
        ("b2", fit.b2),
        ("b3", fit.b3),
        ("b4", fit.b4),
        ("mean_sign", fit.mean_sign),
        ("relative_residual_max", fit.relative_residual_max),
        ("mean_residual_max", fit.mean_residual_max),
        ("second_residual_max", fit.second_residual_max),
        ("fit_t_min", fit.fit_window[0]),
        ("fit_t_max", fit.fit_window[1]),
    ]
    for q in ("mean", "second_moment", "variance"):
        rows.append((f"slope_{q}", estimate_slope(series, q, slope_window)))
    out = args.output_dir
    paths = [write_table(out / "fit.csv", ["parameter", "value"], rows)]
    paths.append(write_meta(out, _meta(args, argv, {"input": str(src)})))
    return paths


def _load_snapshots(directory: Path, times=None):
    found = {}
    for p in sorted(directory.glob("density_t*.csv")):
        t = int(p.stem[len("density_t") :])
        found[t] = p
    if times is not None:
        missing = [t for t in times if t not in found]
        if missing:
            raise CliError(f"no density files for t={missing} in {directory}")
        found = {t: found[t] for t in times}
    found = {t: p for t, p in found.items() if t > 0}
    if len(found) < 2:
        raise CliError(f"need at least two density_t*.csv snapshots with t > 0 in {directory}")
    return [read_density(p, t) for t, p in sorted(found.items())]


def cmd_collapse(args, argv) -> list[Path]:
    densities = _load_snapshots(args.input_dir, args.times)
    out = args.output_dir
    paths = write_collapses(out, "collapse", densities, args.gamma, args.bins)
    extra = {
        "input": str(args.input_dir),
        "times": ",".join(str(d.time) for d in densities),
        "gammas": ",".join(repr(g) for g in args.gamma),
    }
    paths.append(write_meta(out, _meta(args, argv, extra)))
    return paths


def cmd_figures(args, argv) -> list[Path]:
    if args.figure not in FIGURES:
        raise CliError(f"unknown figure {args.figure!r}; choose from {', '.join(FIGURES)}")
    seed = _resolve_seed(args)
    out = args.output_dir
    paths, extra = FIGURES[args.figure](args, seed, out)
    extra.update({"figure": args.figure, "master_seed": seed, "n_realizations": args.realizations})
    paths.append(write_meta(out, _meta(args, argv, extra)))
    return paths


COMMANDS = {
    "simulate": cmd_simulate,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "collapse": cmd_collapse,
    "figures": cmd_figures,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    env, _ = _env_parent().parse_known_args(argv)
    if env.from_meta is not None:
        # the recorded command carries every result-affecting flag
        meta = read_meta(env.from_meta)
        argv = shlex.split(meta["command"])
        out = env.output_dir if env.output_dir != Path(".") else env.from_meta.parent
        argv += ["--output-dir", str(out)]
        if env.threads is not None:
            argv += ["--threads", str(env.threads)]
    args = parser.parse_args(argv)
    try:
        paths = COMMANDS[args.command](args, argv)
    except (CliError, ValueError) as exc:
        # includes the memory ceiling and bad values argparse cannot see
        print(f"qwalk {args.command}: error: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
