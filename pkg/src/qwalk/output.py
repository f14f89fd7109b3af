"""Plain-text CSV writers and readers used by the command-line tools.

Floats are written with 17 significant digits so that a file round-trips
exactly and identical runs give byte-identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .core import Density
from .ensemble import MomentSeries

META_NAME = "run_meta.csv"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_table(path: Path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_columns(path: Path, columns: dict) -> Path:
    """One column per key, all of equal length."""
    names = list(columns)
    arrays = [np.asarray(columns[k]) for k in names]
    return write_table(path, names, zip(*arrays))


def write_density(path: Path, density: Density) -> Path:
    return write_columns(path, {"x": density.positions, "f": density.values})


def write_moments(path: Path, series: MomentSeries) -> Path:
    return write_columns(
        path,
        {
            "t": series.t,
            "mean": series.mean,
            "second_moment": series.second_moment,
            "variance": series.variance,
        },
    )


def write_meta(directory: Path, items: dict) -> Path:
    return write_table(Path(directory) / META_NAME, ["key", "value"], items.items())


def read_meta(path: Path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return {k: v for k, v in rows[1:]}


def read_table(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    header, body = rows[0], rows[1:]
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    return {name: data[:, k] for k, name in enumerate(header)}


def read_moments(path: Path) -> MomentSeries:
    tab = read_table(path)
    return MomentSeries(
        tab["t"].astype(np.int64), tab["mean"], tab["second_moment"], tab["variance"]
    )


def read_density(path: Path, time: int) -> Density:
    tab = read_table(path)
    x = tab["x"].astype(np.int64)
    if not np.all(np.diff(x) == 1):
        raise ValueError(f"{path}: x column must be consecutive integers")
    return Density(tab["f"], int(-x[0]), int(time))
