import numpy as np

from qwalk.core import Density
from qwalk.ensemble import RunConfig, run_ensemble
from qwalk.output import (
    read_density,
    read_meta,
    read_moments,
    read_table,
    write_density,
    write_meta,
    write_moments,
    write_table,
)
from qwalk.schedules import RandomTwoPoint


def test_density_roundtrip_is_exact(tmp_path):
    res = run_ensemble(RunConfig(RandomTwoPoint(0.5, 1), 32, 10, snapshot_times=(32,)))
    d = res.density_at(32)
    p = write_density(tmp_path / "density_t32.csv", d)
    back = read_density(p, 32)
    assert np.array_equal(back.values, d.values)
    assert back.origin_index == d.origin_index
    assert p.read_text().splitlines()[0] == "x,f"


def test_moments_roundtrip_is_exact(tmp_path):
    m = run_ensemble(RunConfig(RandomTwoPoint(0.5, 1), 32, 10)).moments
    back = read_moments(write_moments(tmp_path / "moments.csv", m))
    for name in ("mean", "second_moment", "variance"):
        assert np.array_equal(back.quantity(name), m.quantity(name))
    assert (tmp_path / "moments.csv").read_text().startswith("t,mean,second_moment,variance\n")


def test_meta_and_comments(tmp_path):
    write_meta(tmp_path, {"command": "simulate --seed 3", "t_max": 10, "flag": True})
    assert read_meta(tmp_path / "run_meta.csv") == {"command": "simulate --seed 3", "t_max": "10", "flag": "1"}
    p = tmp_path / "t.csv"
    p.write_text("# produced by hand\na,b\n1,2.5\n3,4\n")
    tab = read_table(p)
    assert tab["b"].tolist() == [2.5, 4.0]


def test_float_formatting(tmp_path):
    p = write_table(tmp_path / "f.csv", ["v"], [(0.1,), (1 / 3,), (np.float64(2.0),), (np.int64(7),)])
    assert p.read_text().split()[1:] == ["0.10000000000000001", "0.33333333333333331", "2", "7"]
    assert float("0.33333333333333331") == 1 / 3


def test_density_read_checks_consecutive_x(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("x,f\n0,0.5\n2,0.5\n")
    try:
        read_density(p, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")
    d = Density(np.array([0.25, 0.5, 0.25]), 1, 2)
    assert np.array_equal(read_density(write_density(tmp_path / "ok.csv", d), 2).values, d.values)
