import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwalk.analysis import estimate_slope
from qwalk.core import DEFAULT_SPINOR, Density, hadamard, init_state, occupation, step
from qwalk.ensemble import (
    MemoryCeilingError,
    QuantumWalkEnsemble,
    RunConfig,
    check_memory,
    default_snapshot_times,
    moments_of,
    resolve_threads,
    run_ensemble,
    run_single,
)
from qwalk.schedules import Constant, Periodic, RandomTwoPoint, SeedSpec, sample_sequence


def reference_walk(config, k):
    """Pure-numpy walk-core evolution of realization k."""
    seq = sample_sequence(config.schedule, config.t_max, SeedSpec(config.master_seed, k))
    s = init_state(config.spinor, config.capacity)
    out = {0: occupation(s)}
    for ell in seq:
        s = step(s, config.coin, ell)
        out[s.time] = occupation(s)
    return out


def test_moments_of_delta():
    assert moments_of(Density(np.array([0.0, 1.0, 0.0]), 1, 0)) == (0.0, 0.0, 0.0)


def test_moments_of_symmetric_pair():
    assert moments_of(Density(np.array([0.5, 0.0, 0.5]), 1, 1)) == pytest.approx((0, 1, 1))


def test_moments_of_first_tick():
    d = Density(np.array([0.9714, 0.0, 0.0286]), 1, 1)
    mean, second, _ = moments_of(d)
    assert mean == pytest.approx(-0.9428, abs=1e-12)
    assert second == pytest.approx(1.0, abs=1e-12)


def test_default_snapshots():
    assert default_snapshot_times(100) == [1, 2, 4, 8, 16, 32, 64, 100]
    assert default_snapshot_times(64)[-1] == 64


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(Constant(1), 0)
    with pytest.raises(ValueError):
        RunConfig(Constant(1), 10, n_realizations=0)
    with pytest.raises(ValueError):
        RunConfig(Constant(1), 10, snapshot_times=(11,))
    cfg = RunConfig("random:alpha=0.5,n=2", 10)
    assert cfg.schedule == RandomTwoPoint(0.5, 2) and cfg.capacity == 40
    assert cfg.replace(t_max=4).snapshot_times == (1, 2, 4)


def test_memory_ceiling():
    check_memory(4096, 8)
    with pytest.raises(MemoryCeilingError):
        check_memory(2**20, 8)


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv("QWALK_THREADS", raising=False)
    assert resolve_threads(None) == 1
    monkeypatch.setenv("QWALK_THREADS", "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2


@pytest.mark.parametrize(
    "schedule", [RandomTwoPoint(0.5, 1), RandomTwoPoint(0.8, 3), Periodic((1, 4, 2)), Constant(3)]
)
def test_kernel_matches_walk_core(schedule):
    cfg = RunConfig(schedule, 40, snapshot_times=(0, 7, 40), master_seed=9)
    ref = reference_walk(cfg, 2)
    dens, series = run_single(cfg, 2)
    for d in dens:
        r = ref[d.time]
        np.testing.assert_allclose(d.values, r.values[r.origin_index - d.origin_index :][: d.values.size], atol=1e-13)
    for t in range(41):
        mean, second, var = moments_of(ref[t])
        assert series.mean[t] == pytest.approx(mean, abs=1e-11)
        assert series.second_moment[t] == pytest.approx(second, rel=1e-12, abs=1e-12)


def test_hadamard_single_run_is_ballistic():
    _, m = run_single(RunConfig(Constant(1), 100), 0)
    ratio = m.second_moment[50:] / m.t[50:] ** 2
    # the unit Hadamard walk has <x^2>/t^2 -> 1 - 1/sqrt(2)
    assert np.ptp(ratio) < 0.01
    assert ratio[-1] == pytest.approx(1 - 1 / np.sqrt(2), abs=1e-3)


def test_t0_snapshot_is_delta():
    dens, _ = run_single(RunConfig(RandomTwoPoint(0.5, 2), 8, snapshot_times=(0, 8)), 0)
    assert dens[0].values.tolist() == [1.0]


def test_run_single_repeatable():
    cfg = RunConfig(RandomTwoPoint(0.5, 1), 64)
    a, ma = run_single(cfg, 5)
    b, mb = run_single(cfg, 5)
    assert all(np.array_equal(x.values, y.values) for x, y in zip(a, b))
    assert np.array_equal(ma.second_moment, mb.second_moment)


@given(st.lists(st.integers(1, 4), min_size=1, max_size=5), st.integers(1, 60))
def test_norm_every_tick(lengths, t_max):
    _, m = run_single(RunConfig(Periodic(tuple(lengths)), t_max), 0)
    assert np.max(np.abs(m.norm - 1.0)) < 1e-10


def test_alpha_one_equals_constant_walk():
    a = run_ensemble(RunConfig(RandomTwoPoint(1.0, 2), 80, n_realizations=20))
    _, m = run_single(RunConfig(Constant(1), 80), 0)
    np.testing.assert_allclose(a.moments.second_moment, m.second_moment, rtol=1e-14)
    b = run_single(RunConfig(Constant(1), 80), 0)[0][-1]
    a80 = a.density_at(80)
    lo = a80.origin_index - b.origin_index
    np.testing.assert_allclose(a80.values[lo : lo + b.values.size], b.values, atol=1e-15)
    assert a80.values.sum() == pytest.approx(1.0, abs=1e-12)


def test_parallel_determinism():
    cfg = RunConfig(RandomTwoPoint(0.5, 1), 128, n_realizations=70, master_seed=42)
    ref = run_ensemble(cfg, threads=1)
    for k in (2, 3, 5):
        other = run_ensemble(cfg, threads=k)
        assert np.array_equal(ref.moments.second_moment, other.moments.second_moment)
        assert np.array_equal(ref.moments.mean, other.moments.mean)
        for a, b in zip(ref.densities, other.densities):
            assert np.array_equal(a.values, b.values)


def test_ensemble_moments_are_mean_of_realizations():
    cfg = RunConfig(RandomTwoPoint(0.5, 1), 100, n_realizations=25, master_seed=3)
    res = run_ensemble(cfg)
    singles = [run_single(cfg, k)[1] for k in range(25)]
    mean = np.mean([s.mean for s in singles], axis=0)
    second = np.mean([s.second_moment for s in singles], axis=0)
    np.testing.assert_allclose(res.moments.mean, mean, rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(res.moments.second_moment, second, rtol=1e-9)
    for d in res.densities:
        np.testing.assert_allclose(moments_of(d), (res.moments.mean[d.time], res.moments.second_moment[d.time], res.moments.variance[d.time]), rtol=1e-9, atol=1e-9)
    assert res.max_norm_error < 1e-10


def test_support_is_monotone():
    res = run_ensemble(RunConfig(RandomTwoPoint(0.5, 2), 64, n_realizations=10))
    reach = [max(abs(v) for v in d.support()) for d in res.densities]
    assert reach == sorted(reach)
    for d in res.densities:
        assert max(abs(v) for v in d.support()) <= 4 * d.time


@pytest.mark.parametrize("alpha", [1.0, 0.0])
def test_pure_walk_limits_are_ballistic(alpha):
    m = run_ensemble(RunConfig(RandomTwoPoint(alpha, 1), 1024, n_realizations=1)).moments
    assert estimate_slope(m, "second_moment", (64, 1024)) == pytest.approx(2.0, abs=0.05)


def test_estimator_interface():
    est = QuantumWalkEnsemble("random:alpha=0.5,n=1", t_max=32, n_realizations=8, seed=4)
    assert est.get_params()["t_max"] == 32
    est.set_params(t_max=16)
    assert est.fit() is est
    assert est.moments_.t[-1] == 16
    assert est.density_at(16).time == 16
    ref = run_ensemble(RunConfig(RandomTwoPoint(0.5, 1), 16, 8, 4))
    assert np.array_equal(est.moments_.second_moment, ref.moments.second_moment)


def test_estimator_custom_coin_and_errors():
    coin = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)
    est = QuantumWalkEnsemble("constant:1", t_max=10, n_realizations=1, coin=coin).fit()
    assert abs(est.moments_.norm[-1] - 1) < 1e-12
    with pytest.raises(ValueError):
        QuantumWalkEnsemble(coin="grover").fit()
