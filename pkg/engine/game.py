"""
elw-lab - Quantized Game

This module defines the ELW-quantized two-player game: the payoff bimatrix,
gate operator construction, initial and final states, outcome probabilities
and expected payoffs.

Basis convention: the classical "cooperate" ket |C> is |e_0>, and the product
ket |e_i> (x) |e_j> sits at flat index i * n + j.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import product as cartesian
from typing import List, Tuple, Union

import numpy as np
import scipy.linalg

from settings import (
    GAMMA_MAX, GAMMA_MIN, NORM_TOL, PAYOFF_SLACK, PROB_CLAMP_TOL
)
from .errors import NumericalIntegrityError, ValidationError
from .matcore import (
    UnitaryMatrix, adjoint, freeze, gell_mann_basis, kron, unitary_from_hermitian
)

logger = logging.getLogger(__name__)

SIGMA_Y = freeze([[0.0, -1j], [1j, 0.0]])
SIGMA_Y_PAIR = kron(SIGMA_Y, SIGMA_Y)
GAMMA_SLACK = 1e-12


class Side(Enum):
    """A player. A is Alice (row, first tensor factor), B is Bob."""
    A = "A"
    B = "B"

    @property
    def other(self) -> "Side":
        return Side.B if self is Side.A else Side.A


@dataclass(frozen=True, eq=False)
class PayoffBimatrix:
    """
    Alice's and Bob's payoff tables.

    Row index is Alice's outcome, column index Bob's. With ``symmetric_game``
    set, bob must equal transpose(alice).
    """
    alice: np.ndarray
    bob: np.ndarray
    symmetric_game: bool = False

    def __post_init__(self):
        alice = np.array(self.alice, dtype=np.float64)
        bob = np.array(self.bob, dtype=np.float64)
        for name, table in (("alice", alice), ("bob", bob)):
            if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] < 2:
                raise ValidationError(f"{name} payoff table must be N x N with N >= 2, got {table.shape}")
            if not np.all(np.isfinite(table)):
                raise ValidationError(f"{name} payoff table has non-finite entries")
        if alice.shape != bob.shape:
            raise ValidationError(f"payoff tables differ in shape: {alice.shape} vs {bob.shape}")
        if self.symmetric_game and not np.array_equal(bob, alice.T):
            raise ValidationError("symmetric game requires bob = transpose(alice)")
        alice.flags.writeable = False
        bob.flags.writeable = False
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob", bob)

    @property
    def n(self) -> int:
        return self.alice.shape[0]

    @classmethod
    def from_rstp(cls, r: float, s: float, t: float, p: float) -> "PayoffBimatrix":
        """The two-strategy table [(r,r) (s,t); (t,s) (p,p)]."""
        return cls([[r, s], [t, p]], [[r, t], [s, p]], symmetric_game=True)

    def table(self, side: Side) -> np.ndarray:
        return self.alice if side is Side.A else self.bob

    def max_entry(self, side: Side) -> float:
        return float(np.max(self.table(side)))


class GateRotation(Enum):
    """Local basis rotation applied around the Cartan exponential."""
    NONE = "none"
    FOURIER = "fourier"


@dataclass(frozen=True)
class N2Gamma:
    """Two-strategy gate exp(-i gamma/2 sigma_2 (x) sigma_2), gamma in [0, pi/2]."""
    gamma: float

    def __post_init__(self):
        gamma = float(self.gamma)
        if not GAMMA_MIN - GAMMA_SLACK <= gamma <= GAMMA_MAX + GAMMA_SLACK:
            raise ValidationError(f"gamma={gamma} outside [0, pi/2]")
        object.__setattr__(self, "gamma", gamma)

    @property
    def n(self) -> int:
        return 2


@dataclass(frozen=True)
class CartanParams:
    """
    General-N gate parameterized by C(n, 2) angles over symmetrized products
    of Cartan generators. Angles are ordered by the pairs of ``cartan_pairs(n)``.
    """
    n: int
    gammas: Tuple[float, ...]
    rotation: GateRotation = GateRotation.NONE

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"Cartan gate needs n >= 2, got {self.n}")
        gammas = tuple(float(g) for g in self.gammas)
        expected = math.comb(self.n, 2)
        if len(gammas) != expected:
            raise ValidationError(
                f"Cartan gate for n={self.n} needs {expected} parameters, got {len(gammas)}"
            )
        if not all(math.isfinite(g) for g in gammas):
            raise ValidationError("Cartan gate parameters must be finite")
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "rotation", GateRotation(self.rotation))


@dataclass(frozen=True, eq=False)
class ExplicitUnitary:
    """A caller-supplied n^2 x n^2 gate."""
    matrix: UnitaryMatrix

    def __post_init__(self):
        if not isinstance(self.matrix, UnitaryMatrix):
            object.__setattr__(self, "matrix", UnitaryMatrix(self.matrix))
        dim = self.matrix.n
        root = int(round(math.sqrt(dim)))
        if root * root != dim or root < 2:
            raise ValidationError(f"explicit gate dimension {dim} is not n^2 for n >= 2")

    @property
    def n(self) -> int:
        return int(round(math.sqrt(self.matrix.n)))


GateSpec = Union[N2Gamma, CartanParams, ExplicitUnitary]


@dataclass(frozen=True, eq=False)
class GateOperator:
    """The realized gate J together with the spec it came from."""
    spec: GateSpec
    unitary: UnitaryMatrix

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def matrix(self) -> np.ndarray:
        return self.unitary.matrix


def cartan_generators(n: int) -> List[np.ndarray]:
    """The n-1 diagonal traceless Hermitian generators d_1..d_{n-1}."""
    return list(gell_mann_basis(n)[n * (n - 1):])


def cartan_pairs(n: int) -> List[Tuple[int, int]]:
    """Index pairs (a, b), a <= b, over the n-1 Cartan generators; C(n, 2) of them."""
    return [(a, b) for a in range(n - 1) for b in range(a, n - 1)]


def fourier_matrix(n: int) -> np.ndarray:
    """Unitary discrete Fourier matrix; it maps |e_0> to the uniform superposition."""
    return freeze(scipy.linalg.dft(n, scale="sqrtn"))


def _cartan_generator_sum(spec: CartanParams) -> np.ndarray:
    generators = cartan_generators(spec.n)
    dim = spec.n * spec.n
    total = np.zeros((dim, dim), dtype=np.complex128)
    for gamma, (a, b) in zip(spec.gammas, cartan_pairs(spec.n)):
        total += gamma * (kron(generators[a], generators[b]) + kron(generators[b], generators[a])) / 2
    return total


def build_gate(spec: GateSpec) -> GateOperator:
    """
    Realize the gate operator J for a spec.

    N2Gamma gives exp(-i gamma/2 sigma_2 (x) sigma_2); CartanParams gives
    exp(i sum gamma_ab sym(d_a (x) d_b)), optionally conjugated by a local
    Fourier rotation; ExplicitUnitary passes through.
    """
    if isinstance(spec, N2Gamma):
        unitary = unitary_from_hermitian(SIGMA_Y_PAIR, -spec.gamma / 2)
    elif isinstance(spec, CartanParams):
        unitary = unitary_from_hermitian(_cartan_generator_sum(spec), 1.0)
        if spec.rotation is GateRotation.FOURIER:
            rotation = kron(fourier_matrix(spec.n), fourier_matrix(spec.n))
            unitary = UnitaryMatrix(rotation @ unitary.matrix @ adjoint(rotation))
    elif isinstance(spec, ExplicitUnitary):
        unitary = spec.matrix
    else:
        raise ValidationError(f"unknown gate spec {type(spec).__name__}")
    return GateOperator(spec, unitary)


def maximally_entangled_ket(n: int) -> np.ndarray:
    """(1/sqrt(n)) sum_i |e_i e_i>, whose F-tilde is the identity."""
    ket = np.zeros(n * n, dtype=np.complex128)
    ket[np.arange(n) * (n + 1)] = 1.0 / math.sqrt(n)
    return ket


def maximally_entangling_spec(n: int, completion: str = "householder") -> ExplicitUnitary:
    """
    An explicit gate sending |CC> to (1/sqrt(n)) sum_i |e_i e_i>.

    Args:
        n: Strategies per player
        completion: "householder" reflects e_0 onto the target and fixes the
            orthogonal complement of the pair; "bell" sends |a, b> to the
            generalized Bell state (1/sqrt(n)) sum_k w^(bk) |k, k+a>, so every
            basis outcome stays maximally entangled.
    """
    if n < 2:
        raise ValidationError(f"maximally entangling gate needs n >= 2, got {n}")
    dim = n * n
    if completion == "householder":
        w = -maximally_entangled_ket(n)
        w[0] += 1.0
        matrix = np.eye(dim, dtype=np.complex128) - 2.0 * np.outer(w, np.conj(w)) / np.vdot(w, w)
    elif completion == "bell":
        omega = np.exp(2j * math.pi / n)
        matrix = np.zeros((dim, dim), dtype=np.complex128)
        for a, b, k in cartesian(range(n), range(n), range(n)):
            matrix[k * n + (k + a) % n, a * n + b] = omega ** (b * k) / math.sqrt(n)
    else:
        raise ValidationError(f"unknown completion '{completion}', expected householder or bell")
    return ExplicitUnitary(UnitaryMatrix(matrix))


@dataclass(frozen=True, eq=False)
class GameInstance:
    """A payoff bimatrix together with its realized gate."""
    payoffs: PayoffBimatrix
    gate: GateOperator

    def __post_init__(self):
        if self.gate.matrix.shape[0] != self.payoffs.n ** 2:
            raise ValidationError(
                f"gate of size {self.gate.matrix.shape[0]} does not match "
                f"{self.payoffs.n}-strategy payoffs"
            )

    @classmethod
    def create(cls, payoffs: PayoffBimatrix, spec: GateSpec) -> "GameInstance":
        return cls(payoffs, build_gate(spec))

    @property
    def n(self) -> int:
        return self.payoffs.n

    @cached_property
    def initial_ket(self) -> np.ndarray:
        return freeze(self.gate.matrix[:, 0])


@dataclass(frozen=True, eq=False)
class StateVector:
    """A normalized ket in the n^2-dimensional product space."""
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = freeze(np.ravel(self.amplitudes))
        if amplitudes.shape[0] != self.n * self.n:
            raise ValidationError(f"state of length {amplitudes.shape[0]} does not match n={self.n}")
        if not np.all(np.isfinite(amplitudes)):
            raise ValidationError("state has non-finite amplitudes")
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized (norm {norm:.12g})")
        object.__setattr__(self, "amplitudes", amplitudes)

    def amplitude(self, i: int, j: int) -> complex:
        return complex(self.amplitudes[i * self.n + j])


def basis_state(n: int, i: int, j: int) -> StateVector:
    """|e_i> (x) |e_j>."""
    ket = np.zeros(n * n, dtype=np.complex128)
    ket[i * n + j] = 1.0
    return StateVector(n, ket)


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """P(i, j) = probability of the joint classical outcome (i, j)."""
    n: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        if probs.size != self.n * self.n:
            raise ValidationError(f"expected {self.n * self.n} outcome probabilities, got {probs.size}")
        probs = probs.reshape(self.n, self.n)
        if not np.all(np.isfinite(probs)) or np.any(probs < -PROB_CLAMP_TOL):
            raise ValidationError("outcome probabilities must be finite and non-negative")
        probs = np.clip(probs, 0.0, None)
        if abs(float(np.sum(probs)) - 1.0) > NORM_TOL:
            raise ValidationError(f"outcome probabilities sum to {float(np.sum(probs)):.12g}")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)


def initial_state(game: GameInstance) -> StateVector:
    """|Psi_i> = J (|C> (x) |C>), the first column of J."""
    return StateVector(game.n, game.initial_ket)


def _check_strategy(game: GameInstance, u: UnitaryMatrix, label: str) -> None:
    if u.n != game.n:
        raise ValidationError(f"{label} strategy is {u.n}x{u.n}, game has n={game.n}")


def final_state(game: GameInstance, uA: UnitaryMatrix, uB: UnitaryMatrix) -> StateVector:
    """|Psi_f> = J^+ (U_A (x) U_B) J |CC>."""
    _check_strategy(game, uA, "Alice's")
    _check_strategy(game, uB, "Bob's")
    local = kron(uA.matrix, uB.matrix)
    ket = adjoint(game.gate.matrix) @ (local @ game.initial_ket)
    return StateVector(game.n, ket)


def outcome_distribution(psi: StateVector) -> OutcomeDistribution:
    """
    P(i, j) = |<e_i e_j | psi>|^2.

    Raises:
        NumericalIntegrityError: if the probabilities drift from summing to 1
    """
    probs = np.abs(psi.amplitudes) ** 2
    if np.any(probs < -PROB_CLAMP_TOL):
        raise NumericalIntegrityError("negative outcome probability")
    probs = np.clip(probs, 0.0, None)
    total = float(np.sum(probs))
    if abs(total - 1.0) > NORM_TOL:
        raise NumericalIntegrityError(f"outcome probabilities sum to {total:.12g}")
    return OutcomeDistribution(psi.n, probs)


def expected_payoffs(dist: OutcomeDistribution, payoffs: PayoffBimatrix) -> Tuple[float, float]:
    """($_A, $_B) = (sum alice(i,j) P(i,j), sum bob(i,j) P(i,j))."""
    if dist.n != payoffs.n:
        raise ValidationError(f"distribution over n={dist.n} does not match payoffs n={payoffs.n}")
    return (
        float(np.sum(payoffs.alice * dist.probs)),
        float(np.sum(payoffs.bob * dist.probs)),
    )


def play(game: GameInstance, uA: UnitaryMatrix, uB: UnitaryMatrix) -> Tuple[float, float]:
    """Expected payoffs of the strategy pair (uA, uB)."""
    return expected_payoffs(outcome_distribution(final_state(game, uA, uB)), game.payoffs)


def classical_strategy(n: int, k: int) -> UnitaryMatrix:
    """
    The k-th classical strategy: a special unitary sending |e_0> to |e_k> up to phase.

    For n = 2 these are C = I and D = i sigma_2. For larger n the cyclic shift
    S^k (S|e_j> = |e_{j+1 mod n}>) re-phased into SU(n) is used.
    """
    if not 0 <= k < n:
        raise ValidationError(f"classical strategy index {k} out of range for n={n}")
    if n == 2:
        return UnitaryMatrix.identity(2) if k == 0 else UnitaryMatrix(1j * SIGMA_Y, special=True)
    shift = np.roll(np.eye(n, dtype=np.complex128), k, axis=0)
    return UnitaryMatrix.special_from(shift)


def classical_strategies(n: int) -> List[UnitaryMatrix]:
    return [classical_strategy(n, k) for k in range(n)]


def classical_pure_equilibria(payoffs: PayoffBimatrix) -> List[Tuple[int, int]]:
    """Cells (i, j) that are pure Nash equilibria of the unquantized bimatrix game."""
    alice, bob = payoffs.alice, payoffs.bob
    cells = []
    for i, j in cartesian(range(payoffs.n), range(payoffs.n)):
        if alice[i, j] >= np.max(alice[:, j]) - PAYOFF_SLACK and bob[i, j] >= np.max(bob[i, :]) - PAYOFF_SLACK:
            cells.append((i, j))
    return cells


def mutual_optimum_cells(payoffs: PayoffBimatrix) -> List[Tuple[int, int]]:
    """Cells where both players receive the maximum entry of their own table."""
    best_a = payoffs.max_entry(Side.A)
    best_b = payoffs.max_entry(Side.B)
    return [
        (i, j)
        for i, j in cartesian(range(payoffs.n), range(payoffs.n))
        if payoffs.alice[i, j] >= best_a - PAYOFF_SLACK and payoffs.bob[i, j] >= best_b - PAYOFF_SLACK
    ]
