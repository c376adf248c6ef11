import math

import numpy as np
import pytest

from engine.entangle import (
    DensityMatrix, FMatrix, density_matrix, entanglement_entropy, f_matrix_of, gate_for_gamma,
    initial_f_matrix, is_maximally_entangled, reduced_spectrum, state_from_f_matrix,
    sweep_entropy, tune_cartan_gate
)
from engine.errors import ValidationError
from engine.game import (
    CartanParams, ExplicitUnitary, GateRotation, N2Gamma, StateVector, basis_state, build_gate,
    maximally_entangled_ket, maximally_entangling_spec
)
from engine.matcore import Subsystem, UnitaryMatrix, haar_random_special_unitary, partial_trace


def _binary_entropy(p: float) -> float:
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


def _initial(gamma: float) -> StateVector:
    return StateVector(2, build_gate(N2Gamma(gamma)).matrix[:, 0])


def test_f_matrix_of_product_state():
    fm = f_matrix_of(basis_state(2, 0, 0))
    assert np.array_equal(fm.f, [[1, 0], [0, 0]])
    assert not fm.maximally_entangled
    assert fm.residual == pytest.approx(1.0)


def test_f_matrix_at_maximal_entanglement():
    fm = f_matrix_of(_initial(math.pi / 2))
    assert np.allclose(fm.ftilde, np.diag([1, 1j]), atol=1e-12)
    assert fm.symmetric and fm.maximally_entangled
    assert fm.residual <= 1e-12


def test_f_matrix_of_uniform_diagonal_state():
    fm = f_matrix_of(StateVector(3, maximally_entangled_ket(3)))
    assert np.allclose(fm.ftilde, np.eye(3), atol=1e-12)
    assert fm.maximally_entangled


def test_f_matrix_round_trip_and_transpose():
    fm = f_matrix_of(_initial(0.7))
    assert np.array_equal(state_from_f_matrix(fm).amplitudes, _initial(0.7).amplitudes)
    assert np.array_equal(fm.transposed().f, fm.f.T)


def test_f_matrix_requires_unit_norm():
    with pytest.raises(ValidationError):
        FMatrix(2, np.eye(2))


def test_maximal_entanglement_diagnostic_at_half_pi():
    diagnostic = is_maximally_entangled(_initial(math.pi / 2), tol=1e-12)
    assert diagnostic
    assert np.max(np.abs(diagnostic.reduced_a - np.eye(2) / 2)) <= 1e-12
    assert np.max(np.abs(diagnostic.reduced_b - np.eye(2) / 2)) <= 1e-12


def test_product_state_is_not_maximally_entangled():
    diagnostic = is_maximally_entangled(_initial(0.0))
    assert not diagnostic
    assert diagnostic.residual > 0.9


def test_quarter_pi_reduced_spectrum():
    psi = _initial(math.pi / 4)
    assert not is_maximally_entangled(psi)
    c, s = math.cos(math.pi / 8) ** 2, math.sin(math.pi / 8) ** 2
    assert np.allclose(np.sort(reduced_spectrum(psi)), [s, c], atol=1e-12)


def test_tolerance_must_be_positive():
    with pytest.raises(ValidationError):
        is_maximally_entangled(_initial(0.1), tol=0.0)


@pytest.mark.parametrize("gamma, expected", [
    (0.0, 0.0),
    (math.pi / 4, _binary_entropy(math.cos(math.pi / 8) ** 2)),
    (math.pi / 2, math.log(2)),
])
def test_entropy_values(gamma, expected):
    assert entanglement_entropy(_initial(gamma)) == pytest.approx(expected, abs=1e-6)


def test_entropy_of_maximally_entangled_qutrits():
    assert entanglement_entropy(StateVector(3, maximally_entangled_ket(3))) == pytest.approx(math.log(3), abs=1e-12)


def test_entropy_agrees_between_reductions():
    game_gate = build_gate(CartanParams(3, (0.3, 1.1, 0.5), GateRotation.FOURIER))
    psi = StateVector(3, game_gate.matrix[:, 0])
    rho = density_matrix(psi).matrix
    entropies = []
    for subsystem in Subsystem:
        spectrum = np.linalg.eigvalsh(partial_trace(rho, subsystem, 3))
        spectrum = spectrum[spectrum > 1e-14]
        entropies.append(float(-np.sum(spectrum * np.log(spectrum))))
    assert entropies[0] == pytest.approx(entropies[1], abs=1e-10)
    assert entanglement_entropy(psi) == pytest.approx(entropies[0], abs=1e-10)


def test_density_matrix_validation():
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(ValidationError):
        DensityMatrix(np.eye(2))


def test_entropy_sweep_is_monotone():
    gammas = np.linspace(0.0, math.pi / 2, 50)
    rows = sweep_entropy(N2Gamma(0.0), gammas)
    entropies = [row.entropy for row in rows]
    assert all(b >= a - 1e-12 for a, b in zip(entropies, entropies[1:]))
    assert rows[-1].maxent_residual <= 1e-12


def test_gate_for_gamma_scales_cartan_direction():
    spec = gate_for_gamma(CartanParams(3, (0.0, 0.0, 0.0)), 0.5)
    assert spec.gammas == (0.5, 0.5, 0.5)
    with pytest.raises(ValidationError):
        gate_for_gamma(ExplicitUnitary(UnitaryMatrix(np.eye(4))), 0.5)


def test_initial_f_matrix(pd_game):
    assert initial_f_matrix(pd_game()).maximally_entangled
    assert not initial_f_matrix(pd_game(0.2)).maximally_entangled


def test_local_strategies_preserve_entropy(pd_game, haar_stream):
    game = pd_game(math.pi / 3)
    draws = haar_stream(2, seed=2)
    ua, ub = next(draws), next(draws)
    moved = StateVector(2, np.kron(ua.matrix, ub.matrix) @ game.initial_ket)
    assert entanglement_entropy(moved) == pytest.approx(entanglement_entropy(_initial(math.pi / 3)), abs=1e-10)


def test_gate_tuning_improves_on_untuned_parameters():
    identity_gate = build_gate(CartanParams(3, (0.0, 0.0, 0.0), GateRotation.FOURIER))
    untuned = f_matrix_of(StateVector(3, identity_gate.matrix[:, 0]))
    result = tune_cartan_gate(3, seed=4, restarts=2)
    assert result.residual < untuned.residual
    assert result.restarts == 2
    assert 0.0 <= result.entropy <= math.log(3) + 1e-12


def _random_initial_state(kind: int, rng: np.random.Generator) -> StateVector:
    if kind == 0:
        return _initial(rng.uniform(0.0, math.pi / 2 - 0.01))
    if kind == 1:
        return _initial(math.pi / 2)
    if kind == 2:
        spec = CartanParams(3, tuple(rng.uniform(-math.pi, math.pi, 3)), GateRotation.FOURIER)
        return StateVector(3, build_gate(spec).matrix[:, 0])
    ua = haar_random_special_unitary(3, rng)
    ub = haar_random_special_unitary(3, rng)
    ket = build_gate(maximally_entangling_spec(3)).matrix[:, 0]
    return StateVector(3, np.kron(ua.matrix, ub.matrix) @ ket)


def test_maximal_entanglement_iff_entropy_is_log_n():
    rng = np.random.default_rng(30)
    hits = 0
    for draw in range(200):
        psi = _random_initial_state(draw % 4, rng)
        at_log_n = abs(entanglement_entropy(psi) - math.log(psi.n)) <= 1e-8
        assert bool(is_maximally_entangled(psi)) == at_log_n
        hits += at_log_n
    assert hits == 100


def test_gate_builders_give_symmetric_f_matrices():
    rng = np.random.default_rng(31)
    for draw in range(100):
        if draw % 2 == 0:
            spec = N2Gamma(rng.uniform(0.0, math.pi / 2))
        else:
            n = 3 + draw % 3
            rotation = GateRotation.FOURIER if draw % 4 == 1 else GateRotation.NONE
            spec = CartanParams(n, tuple(rng.uniform(-math.pi, math.pi, math.comb(n, 2))), rotation)
        fm = f_matrix_of(StateVector(spec.n, build_gate(spec).matrix[:, 0]))
        assert fm.symmetric
        assert np.max(np.abs(fm.f - fm.f.T)) <= 1e-10
