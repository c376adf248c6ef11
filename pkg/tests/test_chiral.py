import math

import numpy as np
import pytest

from engine.chiral import (
    StrategyPair, alice_counterstrategy, counterstrategy, decompose, is_stabilizer,
    stabilizer_pair, stabilizer_partner
)
from engine.entangle import initial_f_matrix
from engine.errors import PreconditionError, ValidationError
from engine.game import (
    ExplicitUnitary, GameInstance, final_state, initial_state, outcome_distribution, play
)
from engine.matcore import UnitaryMatrix, phase_aligned_distance


def _pair_error(a: StrategyPair, b: StrategyPair) -> float:
    return max(phase_aligned_distance(a.uA.matrix, b.uA.matrix),
               phase_aligned_distance(a.uB.matrix, b.uB.matrix))


def test_strategy_pair_validation():
    with pytest.raises(ValidationError):
        StrategyPair(UnitaryMatrix.identity(2), UnitaryMatrix.identity(3))
    with pytest.raises(ValidationError):
        StrategyPair(UnitaryMatrix(np.diag([1j, 1j])), UnitaryMatrix.identity(2))


def test_partner_of_identity(pd_game):
    f = initial_f_matrix(pd_game())
    assert np.allclose(stabilizer_partner(UnitaryMatrix.identity(2), f).matrix, np.eye(2), atol=1e-12)


def test_partner_of_diagonal_strategy(pd_game):
    f = initial_f_matrix(pd_game())
    theta = 0.37
    u = UnitaryMatrix(np.diag([np.exp(1j * theta), np.exp(-1j * theta)]), special=True)
    expected = np.diag([np.exp(-1j * theta), np.exp(1j * theta)])
    assert np.allclose(stabilizer_partner(u, f).matrix, expected, atol=1e-12)


def test_partner_requires_maximal_entanglement(pd_game):
    with pytest.raises(PreconditionError):
        stabilizer_partner(UnitaryMatrix.identity(2), initial_f_matrix(pd_game(0.4)))


def test_stabilizer_pairs_fix_initial_state_two_strategies(pd_game, haar_stream):
    game = pd_game()
    f = initial_f_matrix(game)
    psi = initial_state(game)
    draws = haar_stream(2, seed=100)
    for _ in range(1000):
        check = is_stabilizer(stabilizer_pair(next(draws), f), psi)
        assert check and check.residual <= 1e-10


def test_stabilizer_pairs_fix_initial_state_three_strategies(maxent_game_3, haar_stream):
    f = initial_f_matrix(maxent_game_3)
    psi = initial_state(maxent_game_3)
    draws = haar_stream(3, seed=101)
    for _ in range(200):
        assert is_stabilizer(stabilizer_pair(next(draws), f), psi).residual <= 1e-10


def test_stabilizer_pair_returns_to_cc(pd_game, haar_stream):
    game = pd_game()
    pair = stabilizer_pair(next(haar_stream(2, seed=5)), initial_f_matrix(game))
    assert play(game, pair.uA, pair.uB) == pytest.approx((3.0, 3.0), abs=1e-10)


@pytest.mark.parametrize("fixture, n", [("pd_game", 2), ("maxent_game_3", 3)])
def test_payoffs_ignore_stabilizer_composition(request, fixture, n, haar_stream):
    game = request.getfixturevalue(fixture)
    game = game() if callable(game) else game
    f = initial_f_matrix(game)
    draws = haar_stream(n, seed=103)
    for _ in range(100):
        pair = StrategyPair(next(draws), next(draws))
        moved = pair.compose(stabilizer_pair(next(draws), f))
        assert play(game, moved.uA, moved.uB) == pytest.approx(play(game, pair.uA, pair.uB), abs=1e-10)


@pytest.mark.parametrize("fixture, n", [("pd_game", 2), ("maxent_game_3", 3)])
def test_stabilizer_subgroup_is_closed(request, fixture, n, haar_stream):
    game = request.getfixturevalue(fixture)
    game = game() if callable(game) else game
    f = initial_f_matrix(game)
    psi = initial_state(game)
    draws = haar_stream(n, seed=102)
    for _ in range(200):
        product = stabilizer_pair(next(draws), f).compose(stabilizer_pair(next(draws), f))
        assert is_stabilizer(product, psi).residual <= 1e-10


def test_identity_pair_is_stabilizer(pd_game):
    check = is_stabilizer(StrategyPair(UnitaryMatrix.identity(2), UnitaryMatrix.identity(2)),
                          initial_state(pd_game()))
    assert check.is_stabilizer and check.residual <= 1e-15


def test_equal_pair_is_generally_not_stabilizer(pd_game, haar_stream):
    u = next(haar_stream(2, seed=6))
    assert not is_stabilizer(StrategyPair(u, u), initial_state(pd_game()))


def test_is_stabilizer_checks_dimensions(maxent_game_3):
    with pytest.raises(ValidationError):
        is_stabilizer(StrategyPair(UnitaryMatrix.identity(2), UnitaryMatrix.identity(2)),
                      initial_state(maxent_game_3))


def test_counterstrategy_aligned_case(pd_game, haar_stream):
    f = initial_f_matrix(pd_game())
    draws = haar_stream(2, seed=7)
    u1, u2 = next(draws), next(draws)
    w = counterstrategy(u1, StrategyPair(u1, u2), f)
    assert phase_aligned_distance(w.matrix, u2.matrix) <= 1e-12


def test_counterstrategy_to_identity_target(pd_game, haar_stream):
    game = pd_game()
    f = initial_f_matrix(game)
    v = next(haar_stream(2, seed=8))
    w = counterstrategy(v, StrategyPair(UnitaryMatrix.identity(2), UnitaryMatrix.identity(2)), f)
    assert phase_aligned_distance(w.matrix, stabilizer_partner(v, f).matrix) <= 1e-12
    assert play(game, v, w) == pytest.approx((3.0, 3.0), abs=1e-10)


def test_counterstrategy_reproduces_target_distribution(pd_game, haar_stream):
    game = pd_game()
    f = initial_f_matrix(game)
    draws = haar_stream(2, seed=9)
    for _ in range(1000):
        v, u1, u2 = next(draws), next(draws), next(draws)
        w = counterstrategy(v, StrategyPair(u1, u2), f)
        replayed = outcome_distribution(final_state(game, v, w)).probs
        expected = outcome_distribution(final_state(game, u1, u2)).probs
        assert np.max(np.abs(replayed - expected)) <= 1e-10


def test_counterstrategy_on_three_strategies(maxent_game_3, haar_stream):
    f = initial_f_matrix(maxent_game_3)
    draws = haar_stream(3, seed=10)
    for _ in range(100):
        v, u1, u2 = next(draws), next(draws), next(draws)
        w = counterstrategy(v, StrategyPair(u1, u2), f)
        replayed = outcome_distribution(final_state(maxent_game_3, v, w)).probs
        expected = outcome_distribution(final_state(maxent_game_3, u1, u2)).probs
        assert np.max(np.abs(replayed - expected)) <= 1e-10


def test_alice_counterstrategy_reproduces_target(pd_game, haar_stream):
    game = pd_game()
    f = initial_f_matrix(game)
    draws = haar_stream(2, seed=11)
    for _ in range(100):
        w, u1, u2 = next(draws), next(draws), next(draws)
        v = alice_counterstrategy(w, StrategyPair(u1, u2), f)
        replayed = outcome_distribution(final_state(game, v, w)).probs
        expected = outcome_distribution(final_state(game, u1, u2)).probs
        assert np.max(np.abs(replayed - expected)) <= 1e-10


def test_counterstrategy_handles_non_symmetric_f(pd_payoffs, haar_stream):
    draws = haar_stream(2, seed=12)
    target = (next(draws).matrix / math.sqrt(2)).reshape(-1)
    if abs(target[0]) > 0:
        target = target * np.conj(target[0]) / abs(target[0])
    # Householder reflection sending |CC> to the target ket
    w = -target
    w[0] += 1.0
    gate = np.eye(4) - 2.0 * np.outer(w, w.conj()) / np.vdot(w, w)
    game = GameInstance.create(pd_payoffs, ExplicitUnitary(UnitaryMatrix(gate)))
    f = initial_f_matrix(game)
    assert f.maximally_entangled and not f.symmetric

    for _ in range(100):
        v, u1, u2 = next(draws), next(draws), next(draws)
        w_strategy = counterstrategy(v, StrategyPair(u1, u2), f)
        replayed = outcome_distribution(final_state(game, v, w_strategy)).probs
        expected = outcome_distribution(final_state(game, u1, u2)).probs
        assert np.max(np.abs(replayed - expected)) <= 1e-10
        assert is_stabilizer(stabilizer_pair(v, f), initial_state(game)).residual <= 1e-10


@pytest.mark.parametrize("fixture, n", [("pd_game", 2), ("maxent_game_3", 3)])
def test_decomposition_reconstructs_pair(request, fixture, n, haar_stream):
    game = request.getfixturevalue(fixture)
    game = game() if callable(game) else game
    f = initial_f_matrix(game)
    psi = initial_state(game)
    draws = haar_stream(n, seed=14)
    for _ in range(1000):
        u1, u2, v = next(draws), next(draws), next(draws)
        pair = StrategyPair(u1, u2)
        split = decompose(pair, v, f)
        assert _pair_error(split.reconstruct(), pair) <= 1e-12
        assert is_stabilizer(split.stab_pair, psi).residual <= 1e-10


def test_decomposition_with_aligned_v(pd_game, haar_stream):
    f = initial_f_matrix(pd_game())
    draws = haar_stream(2, seed=15)
    u1, u2 = next(draws), next(draws)
    split = decompose(StrategyPair(u1, u2), u1, f)
    identity = StrategyPair(UnitaryMatrix.identity(2), UnitaryMatrix.identity(2))
    assert _pair_error(split.stab_pair, identity) <= 1e-12
    assert _pair_error(split.rep_pair, StrategyPair(u1, u2)) <= 1e-12


def test_decomposition_with_identity_v(pd_game, haar_stream):
    f = initial_f_matrix(pd_game())
    draws = haar_stream(2, seed=16)
    u1, u2 = next(draws), next(draws)
    split = decompose(StrategyPair(u1, u2), UnitaryMatrix.identity(2), f)
    assert phase_aligned_distance(split.stab_pair.uA.matrix, u1.matrix) <= 1e-12
    assert phase_aligned_distance(split.stab_pair.uB.matrix, stabilizer_partner(u1, f).matrix) <= 1e-12
    assert phase_aligned_distance(split.rep_pair.uA.matrix, np.eye(2)) <= 1e-12
