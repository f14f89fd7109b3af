import itertools

import numpy as np
import pytest

from qwalk.core import DEFAULT_SPINOR, InitialSpinor, hadamard, init_state, occupation, step
from qwalk.ensemble import RunConfig, run_ensemble
from qwalk.oracle import (
    OracleLimitError,
    TruncatedHilbert,
    dense_evolve,
    enumerate_sequences,
    exact_ensemble,
    exact_ensemble_stats,
    monte_carlo_comparison,
)
from qwalk.schedules import Constant, RandomTwoPoint


def core_evolve(spinor, seq, cap):
    s = init_state(spinor, cap)
    for ell in seq:
        s = step(s, hadamard(), ell)
    return s


def assert_states_match(dense, core):
    assert dense.origin_index == core.origin_index
    np.testing.assert_allclose(dense.psi_left, core.psi_left, atol=1e-12, rtol=0)
    np.testing.assert_allclose(dense.psi_right, core.psi_right, atol=1e-12, rtol=0)


@pytest.mark.parametrize("seq", [[1], [2, 2, 2], [1, 2, 1], [4, 1, 8, 2]])
def test_dense_matches_core(seq):
    cfg = RunConfig(Constant(1), len(seq), spinor=DEFAULT_SPINOR)
    dense = dense_evolve(cfg, seq)
    assert_states_match(dense, core_evolve(DEFAULT_SPINOR, seq, dense.origin_index))


def test_step_unitaries_are_unitary():
    space = TruncatedHilbert(4, 3)
    for ell in (1, 2, 4):
        u = space.step_unitary(hadamard(), ell)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(space.dimension), atol=1e-12)


def test_dense_limits():
    with pytest.raises(OracleLimitError):
        dense_evolve(RunConfig(Constant(1), 13), [1] * 13)
    with pytest.raises(ValueError):
        dense_evolve(RunConfig(Constant(1), 1), [0])


def test_enumeration_weights_sum_to_one():
    w = [p for _, p in enumerate_sequences(RandomTwoPoint(0.3, 2), 12)]
    assert len(w) == 4096
    assert np.isclose(np.sum(w), 1.0, atol=1e-12)
    seqs = [s for s, _ in enumerate_sequences(RandomTwoPoint(0.3, 2), 3)]
    assert seqs == sorted(seqs)


def test_exact_ensemble_alpha_one_is_unit_walk():
    cfg = RunConfig(RandomTwoPoint(1.0, 1), 14)
    exact = exact_ensemble(cfg)
    core = occupation(core_evolve(DEFAULT_SPINOR, [1] * 14, cfg.capacity))
    np.testing.assert_array_equal(exact.values, core.values)


def test_exact_ensemble_t2_uniform_average():
    cfg = RunConfig(RandomTwoPoint(0.5, 1), 2)
    exact = exact_ensemble(cfg)
    manual = sum(
        occupation(core_evolve(DEFAULT_SPINOR, s, cfg.capacity)).values
        for s in itertools.product((1, 2), repeat=2)
    )
    np.testing.assert_allclose(exact.values, 0.25 * manual, atol=1e-15)


def test_exact_ensemble_normalized_and_symmetric():
    stats = exact_ensemble_stats(RunConfig(RandomTwoPoint(0.4, 2), 11))
    assert abs(stats.density.values.sum() - 1) < 1e-10
    assert abs(stats.weight_total - 1) < 1e-12
    sym = InitialSpinor(1 / np.sqrt(2), 1j / np.sqrt(2))
    f = exact_ensemble(RunConfig(RandomTwoPoint(0.4, 2), 11, spinor=sym)).values
    np.testing.assert_allclose(f, f[::-1], atol=1e-14)


def test_exact_limit_and_schedule_check():
    with pytest.raises(OracleLimitError):
        exact_ensemble(RunConfig(RandomTwoPoint(0.5, 1), 17))
    with pytest.raises(ValueError):
        exact_ensemble(RunConfig(Constant(1), 4))


def test_monte_carlo_agrees_with_enumeration():
    cfg = RunConfig(RandomTwoPoint(0.5, 1), 8, n_realizations=20_000, master_seed=1)
    cmp = monte_carlo_comparison(cfg)
    assert cmp.max_abs_z < 4
    mc = run_ensemble(cfg.replace(snapshot_times=(8,))).density_at(8)
    np.testing.assert_array_equal(cmp.x, mc.positions)
    np.testing.assert_allclose(cmp.monte_carlo, mc.values, atol=1e-15)


def test_z_scores_are_calibrated():
    # sites are strongly correlated, so check calibration over many seeds
    zs = []
    for seed in range(40):
        cfg = RunConfig(RandomTwoPoint(0.5, 1), 10, n_realizations=2000, master_seed=seed)
        cmp = monte_carlo_comparison(cfg)
        zs.append(cmp.z[cmp.std_error > 0])
    assert np.mean(np.square(zs)) == pytest.approx(1.0, abs=0.3)
