"""
elw-lab - Chiral Group Machinery

Stability subgroup of the initial state inside SU(n) x SU(n), the coset
decomposition of an arbitrary strategy pair, and the counterstrategy built
from it. Everything here requires a maximally entangled initial state, i.e.
a unitary F-tilde.

Complex conjugation is entrywise in the computational basis. The formulas
are written with F-tilde^T and conj(F-tilde); for the symmetric F of every
shipped gate these equal F-tilde and F-tilde^+ respectively.
"""
import logging
from dataclasses import dataclass

import numpy as np

from settings import SPECIAL_DET_TOL, STABILIZER_TOL
from .errors import PreconditionError, ValidationError
from .game import StateVector
from .entangle import FMatrix
from .matcore import UnitaryMatrix, det_residual, kron, rephase_special

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StrategyPair:
    """(U_A, U_B) in SU(n) x SU(n)."""
    uA: UnitaryMatrix
    uB: UnitaryMatrix

    def __post_init__(self):
        if self.uA.n != self.uB.n:
            raise ValidationError(f"strategy dimensions differ: {self.uA.n} vs {self.uB.n}")
        for label, u in (("Alice's", self.uA), ("Bob's", self.uB)):
            if not u.special and det_residual(u.matrix) > SPECIAL_DET_TOL:
                raise ValidationError(f"{label} strategy is not special-unitary")

    @property
    def n(self) -> int:
        return self.uA.n

    def compose(self, other: "StrategyPair") -> "StrategyPair":
        """Componentwise product (self.uA other.uA, self.uB other.uB)."""
        return StrategyPair(
            _special(self.uA.matrix @ other.uA.matrix),
            _special(self.uB.matrix @ other.uB.matrix),
        )

    def local_operator(self) -> np.ndarray:
        return kron(self.uA.matrix, self.uB.matrix)


@dataclass(frozen=True, eq=False)
class CosetDecomposition:
    """(U_1, U_2) = rep_pair * stab_pair with stab_pair in the stability subgroup."""
    rep_pair: StrategyPair
    stab_pair: StrategyPair

    def reconstruct(self) -> StrategyPair:
        return self.rep_pair.compose(self.stab_pair)


@dataclass(frozen=True)
class StabilizerCheck:
    is_stabilizer: bool
    residual: float
    phase: float

    def __bool__(self) -> bool:
        return self.is_stabilizer


def _special(matrix: np.ndarray) -> UnitaryMatrix:
    """Wrap a product that should be in SU(n); re-phase only on determinant drift."""
    if det_residual(matrix) > SPECIAL_DET_TOL:
        logger.debug("Chiral: re-phasing product with |det - 1| = %.3e", det_residual(matrix))
        matrix = rephase_special(matrix)
    return UnitaryMatrix(matrix, special=True)


def _require_maxent(f: FMatrix, n: int) -> None:
    if not f.maximally_entangled:
        raise PreconditionError(
            f"initial state is not maximally entangled (residual {f.residual:.3e}); "
            "F-tilde is not unitary"
        )
    if f.n != n:
        raise ValidationError(f"strategy dimension {n} does not match F-matrix n={f.n}")


def stabilizer_partner(u: UnitaryMatrix, f: FMatrix) -> UnitaryMatrix:
    """
    Bob's half of the stabilizer pair whose Alice half is u.

    Solves U_A F~ U_B^T = F~ for U_B: F~^T conj(u) conj(F~), which is
    F~ conj(u) F~^+ for symmetric F.
    """
    _require_maxent(f, u.n)
    ftilde = f.ftilde
    return _special(ftilde.T @ u.conj() @ np.conj(ftilde))


def counterstrategy(v: UnitaryMatrix, target: StrategyPair, f: FMatrix) -> UnitaryMatrix:
    """
    Bob's strategy W against Alice's v reproducing the outcome of ``target``.

    W = U_2 F~^T U_1^T conj(v) conj(F~), i.e. U_2 F~ conj(U_1)^+ conj(v) F~^+
    for symmetric F. (v, W) yields the same final state as target up to phase.
    """
    _require_maxent(f, v.n)
    if target.n != v.n:
        raise ValidationError("target pair and v differ in dimension")
    ftilde = f.ftilde
    w = target.uB.matrix @ ftilde.T @ target.uA.matrix.T @ v.conj() @ np.conj(ftilde)
    return _special(w)


def alice_counterstrategy(w: UnitaryMatrix, target: StrategyPair, f: FMatrix) -> UnitaryMatrix:
    """
    Alice's strategy against Bob's w reproducing the outcome of ``target``.

    Same construction with the parties swapped, which transposes F.
    """
    return counterstrategy(w, StrategyPair(target.uB, target.uA), f.transposed())


def decompose(pair: StrategyPair, v: UnitaryMatrix, f: FMatrix) -> CosetDecomposition:
    """
    Split (U_1, U_2) as (v, counterstrategy) * (v^+ U_1, partner(v^+ U_1)).
    """
    _require_maxent(f, pair.n)
    stab_alice = _special(v.adjoint() @ pair.uA.matrix)
    stab_pair = StrategyPair(stab_alice, stabilizer_partner(stab_alice, f))
    rep_pair = StrategyPair(v, counterstrategy(v, pair, f))
    return CosetDecomposition(rep_pair=rep_pair, stab_pair=stab_pair)


def is_stabilizer(pair: StrategyPair, psi: StateVector, tol: float = STABILIZER_TOL) -> StabilizerCheck:
    """
    True iff ||(U_A (x) U_B) psi - e^{i phi} psi|| <= tol, phi the phase of
    <psi|(U_A (x) U_B)|psi>.
    """
    if pair.n != psi.n:
        raise ValidationError(f"pair dimension {pair.n} does not match state n={psi.n}")
    moved = pair.local_operator() @ psi.amplitudes
    overlap = np.vdot(psi.amplitudes, moved)
    phase = float(np.angle(overlap)) if abs(overlap) > 0 else 0.0
    residual = float(np.linalg.norm(moved - np.exp(1j * phase) * psi.amplitudes))
    return StabilizerCheck(residual <= tol, residual, phase)


def stabilizer_pair(u: UnitaryMatrix, f: FMatrix) -> StrategyPair:
    """(u, stabilizer_partner(u))."""
    return StrategyPair(u, stabilizer_partner(u, f))
