"""
elw-lab - Entanglement Diagnostics

F-matrix extraction from the initial state, reduced density matrices,
entanglement entropy and the maximal-entanglement criterion
n F F^+ = I (equivalently, F-tilde = sqrt(n) F is unitary).
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.optimize

from settings import (
    EIGENVALUE_FLOOR, ENTROPY_EIG_FLOOR, HERMITIAN_TOL, MAXENT_TOL, NORM_TOL,
    SYMMETRY_TOL, TRACE_TOL
)
from .errors import ValidationError
from .game import (
    CartanParams, GameInstance, GateRotation, GateSpec, N2Gamma, StateVector,
    build_gate, initial_state
)
from .matcore import (
    Subsystem, adjoint, freeze, hermitian_residual, make_rng, partial_trace
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FMatrix:
    """
    Coefficient matrix of a state: |psi> = sum F_ij |e_i> (x) |e_j>.

    ``ftilde`` is sqrt(n) F; ``maximally_entangled`` records whether it is
    unitary within MAXENT_TOL and ``symmetric`` whether F = F^T within SYMMETRY_TOL.
    """
    n: int
    f: np.ndarray
    ftilde: np.ndarray = field(init=False)
    residual: float = field(init=False)
    symmetric: bool = field(init=False)
    maximally_entangled: bool = field(init=False)

    def __post_init__(self):
        f = freeze(np.reshape(self.f, (self.n, self.n)))
        norm = float(np.linalg.norm(f))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"F-matrix has Frobenius norm {norm:.12g}, expected 1")
        residual = maxent_residual_of(f)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "ftilde", freeze(math.sqrt(self.n) * f))
        object.__setattr__(self, "residual", residual)
        object.__setattr__(self, "symmetric", bool(np.max(np.abs(f - f.T)) <= SYMMETRY_TOL))
        object.__setattr__(self, "maximally_entangled", residual <= MAXENT_TOL)

    def transposed(self) -> "FMatrix":
        """The F-matrix seen with the two parties swapped."""
        return FMatrix(self.n, self.f.T)


def maxent_residual_of(f: np.ndarray) -> float:
    """||n F F^+ - I||_max."""
    n = f.shape[0]
    return float(np.max(np.abs(n * (f @ adjoint(f)) - np.eye(n))))


def f_matrix_of(psi: StateVector) -> FMatrix:
    """F(i, j) = amplitude of psi at flat index i * n + j."""
    return FMatrix(psi.n, psi.amplitudes.reshape(psi.n, psi.n))


def state_from_f_matrix(fm: FMatrix) -> StateVector:
    """Inverse of f_matrix_of."""
    return StateVector(fm.n, fm.f.reshape(-1))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator on the product space."""
    matrix: np.ndarray

    def __post_init__(self):
        matrix = freeze(self.matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValidationError(f"density matrix must be square, got shape {matrix.shape}")
        if hermitian_residual(matrix) > HERMITIAN_TOL:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(matrix) - 1.0) > TRACE_TOL:
            raise ValidationError("density matrix trace differs from 1")
        if np.min(scipy.linalg.eigvalsh(matrix)) < EIGENVALUE_FLOOR:
            raise ValidationError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", matrix)


def density_matrix(psi: StateVector) -> DensityMatrix:
    """rho = |psi><psi|."""
    return DensityMatrix(np.outer(psi.amplitudes, np.conj(psi.amplitudes)))


@dataclass(frozen=True, eq=False)
class EntanglementDiagnostic:
    """Outcome of the maximal-entanglement test with its evidence."""
    maximally_entangled: bool
    residual: float
    reduced_a: np.ndarray   # Tr_B rho, Alice's reduced state
    reduced_b: np.ndarray   # Tr_A rho, Bob's reduced state

    def __bool__(self) -> bool:
        return self.maximally_entangled


def is_maximally_entangled(psi: StateVector, tol: float = MAXENT_TOL) -> EntanglementDiagnostic:
    """
    True iff ||n F F^+ - I||_max <= tol.

    Both reduced density matrices are computed independently through
    partial_trace and returned alongside the residual.
    """
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    fm = f_matrix_of(psi)
    rho = density_matrix(psi).matrix
    return EntanglementDiagnostic(
        maximally_entangled=fm.residual <= tol,
        residual=fm.residual,
        reduced_a=partial_trace(rho, Subsystem.B, psi.n),
        reduced_b=partial_trace(rho, Subsystem.A, psi.n),
    )


def reduced_spectrum(psi: StateVector) -> np.ndarray:
    """Eigenvalues of Alice's reduced state F F^+, ascending."""
    f = psi.amplitudes.reshape(psi.n, psi.n)
    return scipy.linalg.eigvalsh(f @ adjoint(f))


def entanglement_entropy(psi: StateVector) -> float:
    """
    von Neumann entropy (natural log) of either reduced state.

    Eigenvalues below ENTROPY_EIG_FLOOR contribute nothing.
    """
    spectrum = reduced_spectrum(psi)
    kept = spectrum[spectrum >= ENTROPY_EIG_FLOOR]
    entropy = float(-np.sum(kept * np.log(kept)))
    return min(max(entropy, 0.0), math.log(psi.n))


@dataclass(frozen=True)
class EntropySweepRow:
    gamma: float
    entropy: float
    maxent_residual: float


def gate_for_gamma(template: GateSpec, gamma: float) -> GateSpec:
    """
    The gate a one-parameter sweep visits at ``gamma``.

    N2Gamma takes gamma directly; CartanParams scales its parameter vector
    (all ones when the template's parameters are zero) by gamma.
    """
    if isinstance(template, N2Gamma):
        return N2Gamma(gamma)
    if isinstance(template, CartanParams):
        direction = np.asarray(template.gammas, dtype=np.float64)
        if not np.any(direction):
            direction = np.ones_like(direction)
        return CartanParams(template.n, tuple(gamma * direction), template.rotation)
    raise ValidationError(f"{type(template).__name__} gates have no gamma to sweep")


def sweep_entropy(template: GateSpec, gammas: Iterable[float]) -> List[EntropySweepRow]:
    """Entropy and maximal-entanglement residual of |Psi_i> along a gamma sweep."""
    rows = []
    for gamma in gammas:
        psi = StateVector(template.n, build_gate(gate_for_gamma(template, gamma)).matrix[:, 0])
        rows.append(EntropySweepRow(
            gamma=float(gamma),
            entropy=entanglement_entropy(psi),
            maxent_residual=f_matrix_of(psi).residual,
        ))
    logger.debug("Entangle: swept %d gamma values", len(rows))
    return rows


@dataclass(frozen=True)
class GateTuningResult:
    """Best Cartan parameters found by the residual-minimizing search."""
    spec: CartanParams
    residual: float
    entropy: float
    restarts: int


def tune_cartan_gate(n: int, seed: int, restarts: int,
                     rotation: GateRotation = GateRotation.FOURIER,
                     objective: Optional[Callable[[StateVector], float]] = None) -> GateTuningResult:
    """
    Search Cartan parameters that minimize the maximal-entanglement residual.

    Nelder-Mead from ``restarts`` seeded random starts; the best local optimum
    is returned. Nothing guarantees the residual reaches zero.
    """
    objective = objective or (lambda psi: f_matrix_of(psi).residual)
    size = math.comb(n, 2)

    def loss(params: Sequence[float]) -> float:
        gate = build_gate(CartanParams(n, tuple(params), rotation))
        return objective(StateVector(n, gate.matrix[:, 0]))

    rng = make_rng(seed)
    best_params, best_loss = None, math.inf
    for restart in range(restarts):
        start = rng.uniform(-math.pi, math.pi, size)
        result = scipy.optimize.minimize(loss, start, method="Nelder-Mead",
                                         options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        logger.debug("Entangle: tuning restart %d reached residual %.3e", restart, result.fun)
        if result.fun < best_loss:
            best_params, best_loss = result.x, float(result.fun)

    spec = CartanParams(n, tuple(float(p) for p in best_params), rotation)
    psi = StateVector(n, build_gate(spec).matrix[:, 0])
    return GateTuningResult(spec, f_matrix_of(psi).residual, entanglement_entropy(psi), restarts)


def initial_f_matrix(game: GameInstance) -> FMatrix:
    """F-matrix of the game's initial state."""
    return f_matrix_of(initial_state(game))

