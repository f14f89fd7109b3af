import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwalk.core import (
    DEFAULT_SPINOR,
    CapacityExceededError,
    CoinOperator,
    Density,
    InitialSpinor,
    WalkerState,
    apply_coin,
    hadamard,
    init_state,
    occupation,
    shift,
    step,
)

R3, R23 = np.sqrt(1 / 3), np.sqrt(2 / 3)
F_LEFT = (R3 + R23) ** 2 / 2  # f(-1, 1) after one Hadamard tick
F_RIGHT = (R3 - R23) ** 2 / 2


def spinors():
    angle = st.floats(0, 2 * np.pi)
    return st.builds(
        lambda th, p1, p2: InitialSpinor(np.cos(th) * np.exp(1j * p1), np.sin(th) * np.exp(1j * p2)),
        st.floats(0, np.pi / 2),
        angle,
        angle,
    )


def evolve(spinor, lengths, cap=None):
    s = init_state(spinor, cap or max(lengths) * len(lengths))
    for ell in lengths:
        s = step(s, hadamard(), ell)
    return s


# construction


def test_init_state_default_spinor_is_delta():
    d = occupation(init_state(DEFAULT_SPINOR, 4))
    assert d.at(0) == pytest.approx(1.0, abs=1e-15)
    assert np.count_nonzero(d.values) == 1
    assert d.values.size == 9


def test_init_state_basis():
    s = init_state(InitialSpinor(1, 0), 1)
    assert s.psi_left[1] == 1
    assert np.count_nonzero(s.psi_left) == 1 and not s.psi_right.any()


def test_init_state_complex_spinor_normalized():
    assert init_state(InitialSpinor(0.6, 0.8j), 2).norm() == pytest.approx(1.0, abs=1e-14)


def test_init_state_rejects_zero_capacity():
    with pytest.raises(ValueError):
        init_state(DEFAULT_SPINOR, 0)


def test_spinor_must_be_normalized():
    with pytest.raises(ValueError):
        InitialSpinor(1.0, 1.0)


def test_coin_must_be_unitary():
    with pytest.raises(ValueError):
        CoinOperator(np.array([[1, 1], [0, 1]], dtype=complex))
    with pytest.raises(ValueError):
        CoinOperator(np.eye(3))


def test_coin_entries_read_only():
    with pytest.raises(ValueError):
        hadamard().entries[0, 0] = 0


def test_walker_state_shapes_must_match():
    with pytest.raises(ValueError):
        WalkerState(np.zeros(3, complex), np.zeros(5, complex), 1)


# coin


def test_hadamard_on_default_spinor():
    s = apply_coin(init_state(DEFAULT_SPINOR, 1), hadamard())
    assert s.psi_left[1] == pytest.approx((R3 + R23) / np.sqrt(2), abs=1e-15)
    assert s.psi_right[1] == pytest.approx((R3 - R23) / np.sqrt(2), abs=1e-15)


def test_hadamard_is_involution():
    s0 = init_state(InitialSpinor(0.6, 0.8j), 3)
    s2 = apply_coin(apply_coin(s0, hadamard()), hadamard())
    np.testing.assert_allclose(s2.psi_left, s0.psi_left, atol=1e-15)
    np.testing.assert_allclose(s2.psi_right, s0.psi_right, atol=1e-15)


def test_coin_keeps_empty_sites_empty():
    s = apply_coin(init_state(DEFAULT_SPINOR, 3), hadamard())
    mask = np.arange(7) != 3
    assert not s.psi_left[mask].any() and not s.psi_right[mask].any()


@given(spinors())
def test_coin_preserves_norm_of_any_vector(sp):
    v = np.array([sp.a0, sp.b0])
    assert np.linalg.norm(hadamard().entries @ v) == pytest.approx(np.linalg.norm(v), abs=1e-12)


# shift


def test_shift_moves_right_mover():
    s = init_state(InitialSpinor(0, 1), 3)
    out = shift(s, 2)
    assert out.psi_right[3 + 2] == 1 and out.psi_right[3] == 0


def test_shift_moves_left_mover():
    left = np.zeros(11, complex)
    left[5 + 5] = 1
    s = WalkerState(left, np.zeros(11, complex), 5)
    assert shift(s, 1).psi_left[5 + 4] == 1


def test_shift_overflow_raises():
    with pytest.raises(CapacityExceededError):
        shift(init_state(InitialSpinor(0, 1), 1), 2)


def test_shift_rejects_nonpositive_length():
    with pytest.raises(ValueError):
        shift(init_state(DEFAULT_SPINOR, 1), 0)


@given(spinors(), st.lists(st.integers(1, 4), min_size=1, max_size=6), st.integers(1, 4))
def test_shift_preserves_norm(sp, lengths, ell):
    s = evolve(sp, lengths, cap=4 * 7)
    assert shift(s, ell).norm() == pytest.approx(s.norm(), abs=1e-12)


# full step


def test_one_step_from_default_spinor():
    d = occupation(step(init_state(DEFAULT_SPINOR, 1), hadamard(), 1))
    assert d.time == 1
    assert d.at(-1) == pytest.approx(F_LEFT, abs=1e-15)
    assert d.at(1) == pytest.approx(F_RIGHT, abs=1e-15)
    assert F_LEFT == pytest.approx(0.9714, abs=1e-4)


def test_symmetric_spinor_gives_symmetric_density():
    sym = InitialSpinor(1 / np.sqrt(2), 1j / np.sqrt(2))
    s = init_state(sym, 60)
    for _ in range(60):
        s = step(s, hadamard(), 1)
        f = occupation(s).values
        np.testing.assert_allclose(f, f[::-1], atol=1e-14)


@given(spinors(), st.lists(st.integers(1, 8), min_size=1, max_size=25))
def test_norm_conserved(sp, lengths):
    s = init_state(sp, 8 * len(lengths))
    for ell in lengths:
        s = step(s, hadamard(), ell)
        assert abs(s.norm() - 1.0) < 1e-10


@given(spinors(), st.lists(st.integers(1, 4), min_size=1, max_size=20))
def test_support_within_light_cone(sp, lengths):
    bound = max(lengths) * len(lengths)
    d = occupation(evolve(sp, lengths, cap=bound + 5))
    assert np.all(d.values[np.abs(d.positions) > bound] == 0.0)


@given(spinors(), st.integers(1, 40))
def test_parity_of_unit_walk(sp, t):
    d = occupation(evolve(sp, [1] * t))
    odd = (d.positions + t) % 2 == 1
    assert np.all(d.values[odd] == 0.0)


@pytest.mark.parametrize("ell", [2, 3, 4])
def test_constant_length_rescaling(ell):
    a = init_state(DEFAULT_SPINOR, 64)
    b = init_state(DEFAULT_SPINOR, 64 * ell)
    for t in range(1, 65):
        a = step(a, hadamard(), 1)
        b = step(b, hadamard(), ell)
        fa, fb = occupation(a), occupation(b)
        np.testing.assert_allclose(fb.values[b.origin_index + ell * fa.positions], fa.values, atol=1e-12)
        off = fb.positions % ell != 0
        assert np.all(fb.values[off] == 0.0)


def test_occupation_nonnegative():
    d = occupation(evolve(InitialSpinor(0.6, 0.8j), [1, 2, 1, 1, 2]))
    assert np.all(d.values >= 0)


# density helpers


def test_density_mirrored_and_trimmed():
    d = Density(np.array([0.0, 0.2, 0.0, 0.8, 0.0, 0.0]), 2, 3)
    assert d.support() == (-1, 1)
    m = d.mirrored()
    assert m.at(1) == 0.2 and m.at(-1) == 0.8
    t = d.trimmed()
    np.testing.assert_array_equal(t.values, [0.2, 0.0, 0.8])
    assert t.origin_index == 1
    assert d.at(100) == 0.0
