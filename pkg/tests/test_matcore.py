import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import engine.matcore as matcore
from engine.errors import SizingError, ValidationError
from engine.game import SIGMA_Y
from engine.matcore import (
    Subsystem, UnitaryMatrix, derive_seed, gell_mann_basis, haar_random_special_unitary,
    kron, make_rng, partial_trace, phase_aligned_distance, unitary_from_hermitian
)


def test_kron_identity_and_scalar():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    a = np.array([[1 + 2j, 3], [4, 5j]])
    assert np.array_equal(kron(a, np.array([[1.0]])), a)


def test_kron_sigma_y_pair_entries():
    pair = kron(SIGMA_Y, SIGMA_Y)
    assert pair[0, 3] == -1
    assert pair[1, 2] == 1
    assert np.all(np.diag(pair) == 0)


def test_kron_is_associative_on_integer_matrices():
    rng = np.random.default_rng(3)
    a, b, c = (rng.integers(-3, 4, (2, 2)) for _ in range(3))
    assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))


def test_kron_rejects_oversized_results(monkeypatch):
    monkeypatch.setattr(matcore, "MAX_MATRIX_ENTRIES", 15)
    with pytest.raises(SizingError):
        kron(np.eye(2), np.eye(2))


def test_exponential_of_zero_is_identity():
    assert np.allclose(unitary_from_hermitian(np.zeros((3, 3)), 1.7).matrix, np.eye(3))


def test_exponential_of_sigma_y():
    u = unitary_from_hermitian(SIGMA_Y, math.pi / 2)
    assert np.allclose(u.matrix, 1j * SIGMA_Y, atol=1e-12)


@pytest.mark.parametrize("gamma", np.linspace(0.0, math.pi / 2, 50))
def test_gate_exponential_matches_series(gamma, series_expm):
    generator = kron(SIGMA_Y, SIGMA_Y)
    u = unitary_from_hermitian(generator, -gamma / 2)
    oracle = series_expm(-1j * gamma / 2 * generator)
    assert np.max(np.abs(u.matrix - oracle)) <= 1e-8
    assert np.max(np.abs(u.matrix @ u.matrix.conj().T - np.eye(4))) <= 1e-10


def test_exponential_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        unitary_from_hermitian(np.array([[0, 1], [0, 0]]), 1.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=9, max_size=9), st.floats(-3, 3))
def test_exponential_is_unitary_for_any_hermitian(entries, scale):
    raw = np.array(entries).reshape(3, 3)
    h = raw + raw.T + 1j * (raw - raw.T)
    u = unitary_from_hermitian(h, scale)
    assert np.max(np.abs(u.matrix @ u.matrix.conj().T - np.eye(3))) <= 1e-10


def test_unitary_matrix_validation():
    with pytest.raises(ValidationError):
        UnitaryMatrix(np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValidationError):
        UnitaryMatrix(np.diag([1j, 1j]), special=True)
    with pytest.raises(ValidationError):
        UnitaryMatrix(np.array([[1, 0, 0], [0, 1, 0]]))
    with pytest.raises(ValidationError):
        UnitaryMatrix(np.array([[np.nan, 0], [0, 1]]))


def test_special_from_rephases():
    u = UnitaryMatrix.special_from(np.diag([1j, 1j]))
    assert abs(np.linalg.det(u.matrix) - 1) <= 1e-12


def test_haar_is_deterministic_per_seed():
    a = haar_random_special_unitary(3, 42)
    b = haar_random_special_unitary(3, 42)
    c = haar_random_special_unitary(3, 43)
    assert np.array_equal(a.matrix, b.matrix)
    assert not np.array_equal(a.matrix, c.matrix)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_haar_output_is_special_unitary(n, haar_stream):
    draws = haar_stream(n, seed=5)
    for _ in range(50):
        u = next(draws).matrix
        assert np.max(np.abs(u @ u.conj().T - np.eye(n))) <= 1e-12
        assert abs(np.linalg.det(u) - 1) <= 1e-10


def test_haar_first_moment():
    rng = make_rng(11)
    samples = [abs(haar_random_special_unitary(2, rng).matrix[0, 0]) ** 2 for _ in range(10_000)]
    assert 0.48 <= float(np.mean(samples)) <= 0.52


def test_haar_rejects_small_n():
    with pytest.raises(ValidationError):
        haar_random_special_unitary(1, 0)


def test_spawn_keys_give_independent_streams():
    assert make_rng(7, 1).random() != make_rng(7, 2).random()
    assert make_rng(7, 1).random() == make_rng(7, 1).random()
    assert derive_seed(7, 1) == derive_seed(7, 1)
    assert derive_seed(7, 1) != derive_seed(7, 2)


def test_seed_must_fit_u64():
    with pytest.raises(ValidationError):
        make_rng(-1)
    with pytest.raises(ValidationError):
        make_rng(1 << 64)


def _rho(ket):
    ket = np.asarray(ket, dtype=np.complex128)
    return np.outer(ket, ket.conj())


def test_partial_trace_of_product_state():
    cc = np.array([1, 0, 0, 0])
    assert np.allclose(partial_trace(_rho(cc), Subsystem.B, 2), [[1, 0], [0, 0]])
    assert np.allclose(partial_trace(_rho(cc), Subsystem.A, 2), [[1, 0], [0, 0]])


def test_partial_trace_keeps_alice_pure_for_cc_plus_cd():
    ket = np.array([1, 1, 0, 0]) / math.sqrt(2)
    assert np.allclose(partial_trace(_rho(ket), Subsystem.B, 2), [[1, 0], [0, 0]], atol=1e-12)
    assert np.allclose(partial_trace(_rho(ket), Subsystem.A, 2), [[0.5, 0.5], [0.5, 0.5]], atol=1e-12)


def test_partial_trace_of_maximally_entangled_state():
    ket = np.array([1, 0, 0, 1j]) / math.sqrt(2)
    for subsystem in Subsystem:
        assert np.max(np.abs(partial_trace(_rho(ket), subsystem, 2) - np.eye(2) / 2)) <= 1e-12


def test_partial_trace_distinguishes_parties():
    # |C> (x) |+>: Alice pure |C>, Bob pure |+>
    ket = np.kron([1, 0], np.array([1, 1]) / math.sqrt(2))
    assert np.allclose(partial_trace(_rho(ket), Subsystem.B, 2), [[1, 0], [0, 0]])
    assert np.allclose(partial_trace(_rho(ket), Subsystem.A, 2), [[0.5, 0.5], [0.5, 0.5]])


@pytest.mark.parametrize("rho, n", [
    (np.eye(3) / 3, 2),
    (np.eye(4), 2),
    (np.array([[0.5, 1], [0, 0.5]]), 1),
])
def test_partial_trace_rejects_bad_input(rho, n):
    with pytest.raises(ValidationError):
        partial_trace(rho, Subsystem.A, n)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gell_mann_basis_is_orthogonal_and_traceless(n):
    basis = gell_mann_basis(n)
    assert len(basis) == n * n - 1
    for k, a in enumerate(basis):
        assert abs(np.trace(a)) <= 1e-12
        assert np.allclose(a, a.conj().T)
        for b in basis[k + 1:]:
            assert abs(np.trace(a @ b)) <= 1e-12


def test_phase_aligned_distance_ignores_global_phase():
    u = haar_random_special_unitary(3, 9).matrix
    assert phase_aligned_distance(np.exp(0.7j) * u, u) <= 1e-12
    assert phase_aligned_distance(u, np.eye(3)) > 1e-3
