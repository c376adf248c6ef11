"""
elw-lab - Nash Equilibria

Best responses, epsilon-equilibrium certification, analytic nonexistence
witnesses at maximal entanglement, and best-response dynamics.

When the initial state is maximally entangled every best response is
analytic: steer the joint outcome to the responder's best cell with the
counterstrategy. Otherwise a multi-start finite-difference ascent over the
su(n) coordinates is used.
"""
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from itertools import product as cartesian
from typing import Callable, Iterable, List, Optional, Protocol, Sequence, Tuple

import numpy as np
import scipy.optimize

from settings import (
    CYCLE_TOL, DEFAULT_EPSILON, DEFAULT_MAX_ITERS, DEFAULT_MAX_ROUNDS, DEFAULT_PROBE_COUNT,
    DEFAULT_RESTARTS, DEFAULT_SEED, DEFAULT_STEP_TOL, FD_STEP, MAXENT_TOL, PAYOFF_SLACK,
    REACH_TOL, STATIONARY_TOL
)
from .chiral import StrategyPair, alice_counterstrategy, counterstrategy
from .entangle import FMatrix, f_matrix_of, maxent_residual_of
from .errors import PreconditionError, ValidationError
from .game import (
    GameInstance, Side, classical_strategies, classical_strategy, final_state,
    initial_state, outcome_distribution, play
)
from .matcore import (
    UnitaryMatrix, adjoint, derive_seed, gell_mann_basis, haar_random_special_unitary,
    make_rng, phase_aligned_distance, unitary_from_hermitian
)

logger = logging.getLogger(__name__)

# spawn-key tags keeping the random streams of different tasks apart
_SIDE_KEY = {Side.A: 1, Side.B: 2}
_PROBE_KEY = 3
_SEARCH_KEY = 4
_VERIFY_KEY = 5


class BestResponseMethod(Enum):
    ANALYTIC = "analytic_counterstrategy"
    NUMERIC = "numeric_ascent"


class EquilibriumStatus(Enum):
    CERTIFIED = "certified_epsilon_equilibrium"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


class Termination(Enum):
    FIXED_POINT = "fixed_point"
    CYCLE = "cycle"
    MAX_ROUNDS = "max_rounds"


class StrategySubset(Protocol):
    """A parameterized family of admissible strategies for the numeric branch."""

    def parameter_count(self, n: int) -> int:
        ...

    def matrix(self, x: np.ndarray, n: int) -> np.ndarray:
        ...


@lru_cache(maxsize=None)
def _stacked_basis(n: int) -> np.ndarray:
    return np.stack(gell_mann_basis(n))


class FullSpecialUnitary:
    """All of SU(n): x -> exp(i sum x_k T_k) over the Gell-Mann basis T_k."""

    def parameter_count(self, n: int) -> int:
        return n * n - 1

    def matrix(self, x: np.ndarray, n: int) -> np.ndarray:
        generator = np.tensordot(np.asarray(x, dtype=np.float64), _stacked_basis(n), axes=1)
        return unitary_from_hermitian(generator, 1.0).matrix


FULL_SPECIAL_UNITARY = FullSpecialUnitary()


@dataclass(frozen=True)
class SolverConfig:
    """
    Knobs for best responses, certification and search.

    ``restarts`` counts ascent starts per numeric best response and dynamics
    runs per search; ``max_iters`` bounds each ascent and ``max_rounds`` each
    dynamics run. ``subset`` restricts the numeric branch to a strategy family
    and disables the analytic branch, which assumes all of SU(n).
    """
    restarts: int = DEFAULT_RESTARTS
    max_iters: int = DEFAULT_MAX_ITERS
    step_tolerance: float = DEFAULT_STEP_TOL
    epsilon: float = DEFAULT_EPSILON
    probe_count: int = DEFAULT_PROBE_COUNT
    seed: int = DEFAULT_SEED
    max_rounds: int = DEFAULT_MAX_ROUNDS
    subset: Optional[StrategySubset] = None

    def __post_init__(self):
        for name in ("restarts", "max_iters", "probe_count", "max_rounds"):
            if int(getattr(self, name)) <= 0:
                raise ValidationError(f"solver {name} must be positive")
        if self.step_tolerance <= 0 or self.epsilon <= 0:
            raise ValidationError("solver tolerances must be positive")
        if self.epsilon <= self.step_tolerance:
            raise ValidationError("solver epsilon must exceed the step tolerance")
        if not 0 <= int(self.seed) < 1 << 64:
            raise ValidationError(f"seed {self.seed} is not a 64-bit unsigned integer")

    def with_seed(self, seed: int) -> "SolverConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True, eq=False)
class BestResponseResult:
    strategy: UnitaryMatrix
    value: float
    method: BestResponseMethod
    iterations: int
    converged: bool
    fallback: bool = False
    converged_restarts: int = 0
    target_cell: Optional[Tuple[int, int]] = None


@dataclass(frozen=True, eq=False)
class Witness:
    """A unilateral deviation that improves the deviating side's payoff."""
    side: Side
    deviation: UnitaryMatrix
    gain: float
    value: float
    source: str


@dataclass(frozen=True, eq=False)
class EquilibriumReport:
    status: EquilibriumStatus
    candidate: StrategyPair
    witness: Optional[Witness]
    probes_used: int
    epsilon: float
    payoffs: Tuple[float, float]
    termination: Optional[Termination] = None
    rounds: int = 0


def responder_payoff(game: GameInstance, side: Side, own: UnitaryMatrix, opponent: UnitaryMatrix) -> float:
    """Payoff of ``side`` playing ``own`` against ``opponent``."""
    if side is Side.A:
        return play(game, own, opponent)[0]
    return play(game, opponent, own)[1]


def _side_payoff(payoffs: Tuple[float, float], side: Side) -> float:
    return payoffs[0] if side is Side.A else payoffs[1]


def _opponent_of(pair: StrategyPair, side: Side) -> UnitaryMatrix:
    return pair.uB if side is Side.A else pair.uA


def _with_side(pair: StrategyPair, side: Side, strategy: UnitaryMatrix) -> StrategyPair:
    if side is Side.A:
        return StrategyPair(strategy, pair.uB)
    return StrategyPair(pair.uA, strategy)


def strategy_objective(game: GameInstance, side: Side, opponent: UnitaryMatrix,
                       subset: Optional[StrategySubset] = None) -> Callable[[np.ndarray], float]:
    """Responder payoff as a function of the subset coordinates x."""
    subset = subset or FULL_SPECIAL_UNITARY
    n = game.n
    f = game.initial_ket.reshape(n, n)
    j_adjoint = adjoint(game.gate.matrix)
    table = game.payoffs.table(side).reshape(-1)
    opp = opponent.matrix

    def objective(x: np.ndarray) -> float:
        own = subset.matrix(x, n)
        moved = own @ f @ opp.T if side is Side.A else opp @ f @ own.T
        probs = np.abs(j_adjoint @ moved.reshape(-1)) ** 2
        return float(np.dot(table, probs))

    return objective


def central_gradient(fn: Callable[[np.ndarray], float], x: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central finite-difference gradient."""
    grad = np.empty_like(x, dtype=np.float64)
    for k in range(x.shape[0]):
        step = np.zeros_like(x, dtype=np.float64)
        step[k] = h
        grad[k] = (fn(x + step) - fn(x - step)) / (2 * h)
    return grad


def _ascend(objective: Callable[[np.ndarray], float], x0: np.ndarray,
            cfg: SolverConfig) -> Tuple[np.ndarray, float, int, bool]:
    """
    Maximize ``objective`` with BFGS on its negation, central-difference gradient.

    Returns:
        (x, value, iterations, converged) with converged meaning BFGS reached
        gtol = cfg.step_tolerance, or stopped with a gradient below STATIONARY_TOL
    """
    result = scipy.optimize.minimize(
        lambda x: -objective(x),
        np.array(x0, dtype=np.float64),
        jac=lambda x: -central_gradient(objective, x),
        method="BFGS",
        options={"maxiter": cfg.max_iters, "gtol": cfg.step_tolerance},
    )
    gradient = float(np.max(np.abs(result.jac))) if result.jac.size else 0.0
    converged = bool(result.success) or gradient <= STATIONARY_TOL
    if not converged:
        logger.debug("Nash: BFGS stopped (%s) with gradient %.3e", result.message, gradient)
    return result.x, objective(result.x), int(result.nit), converged


def _numeric_best_response(game: GameInstance, side: Side, opponent: UnitaryMatrix,
                           cfg: SolverConfig, fallback: bool = False) -> BestResponseResult:
    subset = cfg.subset or FULL_SPECIAL_UNITARY
    objective = strategy_objective(game, side, opponent, subset)
    rng = make_rng(cfg.seed, _SIDE_KEY[side])
    size = subset.parameter_count(game.n)

    best = None
    total_iterations = 0
    converged_restarts = 0
    for restart in range(cfg.restarts):
        x0 = rng.uniform(-math.pi, math.pi, size)
        x, value, iterations, converged = _ascend(objective, x0, cfg)
        total_iterations += iterations
        converged_restarts += int(converged)
        logger.debug("Nash: ascent restart %d for side %s reached %.12g (converged=%s)",
                     restart, side.value, value, converged)
        if best is None or value > best[1]:
            best = (x, value, converged)

    x, value, converged = best
    strategy = UnitaryMatrix.special_from(subset.matrix(x, game.n))
    return BestResponseResult(
        strategy=strategy,
        value=responder_payoff(game, side, strategy, opponent),
        method=BestResponseMethod.NUMERIC,
        iterations=total_iterations,
        converged=converged,
        fallback=fallback,
        converged_restarts=converged_restarts,
    )


def _reaches(game: GameInstance, pair: StrategyPair, cell: Tuple[int, int]) -> bool:
    probs = outcome_distribution(final_state(game, pair.uA, pair.uB)).probs
    return probs[cell] >= 1.0 - REACH_TOL


def steering_pair(game: GameInstance, cell: Tuple[int, int],
                  f: Optional[FMatrix] = None) -> Optional[StrategyPair]:
    """
    A strategy pair whose final state is the basis outcome ``cell``.

    The classical pair (classical_strategy(i), classical_strategy(j)) is tried
    first. At maximal entanglement the pair (I, G~^T conj(F~)) is tried next,
    where G~ = sqrt(n) F of J|e_i e_j>; it works whenever that ket is itself
    maximally entangled. Returns None when neither reaches the cell.
    """
    n = game.n
    i, j = cell
    classical = StrategyPair(classical_strategy(n, i), classical_strategy(n, j))
    if _reaches(game, classical, cell):
        return classical

    f = f or f_matrix_of(initial_state(game))
    if not f.maximally_entangled:
        return None
    target = game.gate.matrix[:, i * n + j].reshape(n, n)
    if maxent_residual_of(target) > MAXENT_TOL:
        return None
    local = UnitaryMatrix.special_from(math.sqrt(n) * target.T @ np.conj(f.ftilde))
    pair = StrategyPair(UnitaryMatrix.identity(n), local)
    return pair if _reaches(game, pair, cell) else None


def _best_cells(game: GameInstance, side: Side) -> List[Tuple[int, int]]:
    table = game.payoffs.table(side)
    best = float(np.max(table))
    return [
        (i, j) for i, j in cartesian(range(game.n), range(game.n))
        if table[i, j] >= best - PAYOFF_SLACK
    ]


def _analytic_best_response(game: GameInstance, side: Side, opponent: UnitaryMatrix,
                            f: FMatrix) -> Optional[BestResponseResult]:
    for cell in _best_cells(game, side):
        target = steering_pair(game, cell, f)
        if target is None:
            continue
        if side is Side.B:
            strategy = counterstrategy(opponent, target, f)
        else:
            strategy = alice_counterstrategy(opponent, target, f)
        return BestResponseResult(
            strategy=strategy,
            value=responder_payoff(game, side, strategy, opponent),
            method=BestResponseMethod.ANALYTIC,
            iterations=0,
            converged=True,
            converged_restarts=1,
            target_cell=cell,
        )
    return None


def best_response(game: GameInstance, side: Side, opponent: UnitaryMatrix,
                  cfg: SolverConfig) -> BestResponseResult:
    """
    The responder's best strategy against a fixed opponent.

    Analytic (counterstrategy to the best cell) at maximal entanglement,
    numeric multi-start ascent otherwise or when no best cell is reachable.
    """
    if opponent.n != game.n:
        raise ValidationError(f"opponent strategy is {opponent.n}x{opponent.n}, game has n={game.n}")

    f = f_matrix_of(initial_state(game))
    if f.maximally_entangled and cfg.subset is None:
        result = _analytic_best_response(game, side, opponent, f)
        if result is not None:
            return result
        logger.warning("Nash: no steering pair reaches a best cell for side %s; "
                       "falling back to numeric ascent", side.value)
        return _numeric_best_response(game, side, opponent, cfg, fallback=True)
    return _numeric_best_response(game, side, opponent, cfg)


def _probe_deviations(n: int, count: int, rng: np.random.Generator) -> Iterable[Tuple[str, UnitaryMatrix]]:
    for strategy in classical_strategies(n):
        yield "classical_probe", strategy
    for _ in range(count):
        yield "haar_probe", haar_random_special_unitary(n, rng)


def verify_equilibrium(game: GameInstance, candidate: StrategyPair, cfg: SolverConfig) -> EquilibriumReport:
    """
    Certify or refute ``candidate`` as an epsilon-equilibrium.

    Each side's best response is checked first (Bob, then Alice); if neither
    gains more than epsilon, the classical strategies and probe_count Haar
    deviations per side are probed as well.
    """
    current = play(game, candidate.uA, candidate.uB)
    report = dict(candidate=candidate, epsilon=cfg.epsilon, payoffs=current)

    unconverged = False
    for side in (Side.B, Side.A):
        response = best_response(game, side, _opponent_of(candidate, side), cfg)
        gain = response.value - _side_payoff(current, side)
        if gain > cfg.epsilon:
            witness = Witness(side, response.strategy, gain, response.value, response.method.value)
            return EquilibriumReport(EquilibriumStatus.REFUTED, witness=witness, probes_used=0, **report)
        if response.method is BestResponseMethod.NUMERIC and response.converged_restarts == 0:
            unconverged = True

    rng = make_rng(cfg.seed, _PROBE_KEY)
    probes_used = 0
    for side in (Side.B, Side.A):
        opponent = _opponent_of(candidate, side)
        for source, deviation in _probe_deviations(game.n, cfg.probe_count, rng):
            probes_used += 1
            value = responder_payoff(game, side, deviation, opponent)
            gain = value - _side_payoff(current, side)
            if gain > cfg.epsilon:
                witness = Witness(side, deviation, gain, value, source)
                return EquilibriumReport(EquilibriumStatus.REFUTED, witness=witness,
                                         probes_used=probes_used, **report)

    status = EquilibriumStatus.INCONCLUSIVE if unconverged else EquilibriumStatus.CERTIFIED
    return EquilibriumReport(status, witness=None, probes_used=probes_used, **report)


def nonexistence_witness(game: GameInstance, candidate: StrategyPair) -> Optional[Witness]:
    """
    Analytic refutation of a candidate at maximal entanglement.

    Tries Bob's then Alice's counterstrategy to their best cell and returns
    the first deviation that gains more than PAYOFF_SLACK. None means both
    players already sit at the maximum entries of their tables.

    Raises:
        PreconditionError: if the initial state is not maximally entangled,
            or a best cell cannot be steered to; use verify_equilibrium then
    """
    f = f_matrix_of(initial_state(game))
    if not f.maximally_entangled:
        raise PreconditionError(
            f"initial state is not maximally entangled (residual {f.residual:.3e}); "
            "use verify_equilibrium instead"
        )
    current = play(game, candidate.uA, candidate.uB)
    for side in (Side.B, Side.A):
        response = _analytic_best_response(game, side, _opponent_of(candidate, side), f)
        if response is None:
            raise PreconditionError(
                f"no steering pair reaches a best cell for side {side.value}; "
                "use verify_equilibrium instead"
            )
        gain = response.value - _side_payoff(current, side)
        if gain > PAYOFF_SLACK:
            return Witness(side, response.strategy, gain, response.value, response.method.value)
    return None


def pair_distance(a: StrategyPair, b: StrategyPair) -> float:
    """Phase-aligned operator distance between two pairs, worst component."""
    return max(
        phase_aligned_distance(a.uA.matrix, b.uA.matrix),
        phase_aligned_distance(a.uB.matrix, b.uB.matrix),
    )


def _dynamics_run(game: GameInstance, cfg: SolverConfig, index: int) -> EquilibriumReport:
    rng = make_rng(cfg.seed, _SEARCH_KEY, index)
    pair = StrategyPair(haar_random_special_unitary(game.n, rng), haar_random_special_unitary(game.n, rng))
    history = [pair]
    termination = Termination.MAX_ROUNDS
    rounds = 0

    for rounds in range(1, cfg.max_rounds + 1):
        changed = False
        for side in (Side.B, Side.A):
            side_cfg = cfg.with_seed(derive_seed(cfg.seed, _SEARCH_KEY, index, rounds, _SIDE_KEY[side]))
            current = _side_payoff(play(game, pair.uA, pair.uB), side)
            response = best_response(game, side, _opponent_of(pair, side), side_cfg)
            if response.value - current > cfg.epsilon:
                pair = _with_side(pair, side, response.strategy)
                changed = True
        if not changed:
            termination = Termination.FIXED_POINT
            break
        if any(pair_distance(pair, earlier) < CYCLE_TOL for earlier in history):
            termination = Termination.CYCLE
            break
        history.append(pair)

    report = verify_equilibrium(game, pair, cfg.with_seed(derive_seed(cfg.seed, _VERIFY_KEY, index)))
    logger.info("Nash: run %d ended on %s after %d rounds: %s",
                index, termination.value, rounds, report.status.value)
    return replace(report, termination=termination, rounds=rounds)


def equilibrium_search(game: GameInstance, cfg: SolverConfig,
                       map_fn: Callable = map) -> List[EquilibriumReport]:
    """
    Best-response dynamics from ``cfg.restarts`` random initial pairs.

    A side switches only when its best response gains more than epsilon.
    Each run stops at a fixed point, on a pair recurrence within CYCLE_TOL,
    or after cfg.max_rounds, and its final pair is passed through
    verify_equilibrium. ``map_fn`` may run the independent restarts
    concurrently; it must return results in input order.
    """
    return list(map_fn(lambda index: _dynamics_run(game, cfg, index), range(cfg.restarts)))


def classical_candidates(n: int) -> Sequence[StrategyPair]:
    """All n^2 pairs of classical strategies."""
    strategies = classical_strategies(n)
    return [StrategyPair(a, b) for a in strategies for b in strategies]
