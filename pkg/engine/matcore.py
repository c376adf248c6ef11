"""
Dense complex linear algebra shared by every engine module.

Matrices are plain ``complex128`` numpy arrays, frozen (read-only) once they
leave this module. Product-space kets use the flat index ``i * n + j`` for
``|e_i> (x) |e_j>``.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

import numpy as np
import scipy.linalg

from settings import (
    HERMITIAN_TOL, MAX_MATRIX_ENTRIES, SPECIAL_DET_TOL, TRACE_TOL, UNITARY_TOL
)
from .errors import SizingError, ValidationError

SeedLike = Union[int, np.random.Generator]

_U64_LIMIT = 1 << 64


class Subsystem(Enum):
    """The two parties of the product space."""
    A = "A"
    B = "B"


def freeze(array: np.ndarray) -> np.ndarray:
    """Return a read-only complex128 copy of ``array``."""
    out = np.array(array, dtype=np.complex128, copy=True)
    out.flags.writeable = False
    return out


def as_complex_matrix(data, name: str = "matrix") -> np.ndarray:
    """
    Validate and freeze a complex matrix.

    Args:
        data: Anything numpy can turn into a 2-D array
        name: Label used in error messages

    Returns:
        A read-only complex128 array

    Raises:
        ValidationError: if the input is not 2-D, is empty or holds NaN/Inf
    """
    matrix = np.asarray(data, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.size == 0:
        raise ValidationError(f"{name} must be a non-empty 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValidationError(f"{name} has non-finite entries")
    return freeze(matrix)


def adjoint(matrix: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(matrix).T


def product(*matrices: np.ndarray) -> np.ndarray:
    """Left-to-right matrix product of two or more factors."""
    if len(matrices) == 1:
        return np.array(matrices[0], dtype=np.complex128)
    return np.linalg.multi_dot(matrices)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Kronecker product with entry ((i*b.rows + k), (j*b.cols + l)) = a(i,j) * b(k,l).

    Raises:
        SizingError: if the result would exceed MAX_MATRIX_ENTRIES
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or b.ndim != 2:
        raise ValidationError("kron expects two 2-D matrices")
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows * cols > MAX_MATRIX_ENTRIES:
        raise SizingError(f"Kronecker product of size {rows}x{cols} exceeds the entry limit")
    return freeze(np.kron(a, b))


def hermitian_residual(matrix: np.ndarray) -> float:
    """max |h - h^+|."""
    return float(np.max(np.abs(matrix - adjoint(matrix))))


def unitarity_residual(matrix: np.ndarray) -> float:
    """max |U U^+ - I|."""
    n = matrix.shape[0]
    return float(np.max(np.abs(matrix @ adjoint(matrix) - np.eye(n))))


def det_residual(matrix: np.ndarray) -> float:
    """|det U - 1|."""
    return float(abs(np.linalg.det(matrix) - 1.0))


def rephase_special(matrix: np.ndarray) -> np.ndarray:
    """
    Multiply a unitary by the global phase that brings its determinant to 1.

    The principal n-th root of det is used, so an input already in SU(n) up to
    roundoff moves by roundoff only.
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    n = matrix.shape[0]
    det = np.linalg.det(matrix)
    phase = np.exp(-1j * np.angle(det) / n)
    return matrix * phase


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """
    A validated square unitary matrix.

    When ``special`` is set the determinant is also checked against 1.
    """
    matrix: np.ndarray
    special: bool = False
    tol: float = field(default=UNITARY_TOL, repr=False, compare=False)

    def __post_init__(self):
        matrix = as_complex_matrix(self.matrix, "unitary")
        if matrix.shape[0] != matrix.shape[1]:
            raise ValidationError(f"unitary must be square, got shape {matrix.shape}")
        residual = unitarity_residual(matrix)
        if residual > self.tol:
            raise ValidationError(f"matrix is not unitary (residual {residual:.3e})")
        if self.special and det_residual(matrix) > SPECIAL_DET_TOL:
            raise ValidationError(
                f"matrix is not special-unitary (|det - 1| = {det_residual(matrix):.3e})"
            )
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def special_from(cls, matrix: np.ndarray) -> "UnitaryMatrix":
        """Re-phase a unitary into SU(n) and wrap it."""
        return cls(rephase_special(matrix), special=True)

    @classmethod
    def identity(cls, n: int) -> "UnitaryMatrix":
        return cls(np.eye(n, dtype=np.complex128), special=True)

    def conj(self) -> np.ndarray:
        """Entrywise conjugate in the computational basis."""
        return np.conj(self.matrix)

    def adjoint(self) -> np.ndarray:
        return adjoint(self.matrix)


def unitary_from_hermitian(h: np.ndarray, scale: float) -> UnitaryMatrix:
    """
    exp(i * scale * h) for a Hermitian generator, via eigendecomposition.

    Raises:
        ValidationError: if h is not Hermitian within HERMITIAN_TOL
    """
    h = as_complex_matrix(h, "generator")
    if h.shape[0] != h.shape[1]:
        raise ValidationError("generator must be square")
    if hermitian_residual(h) > HERMITIAN_TOL:
        raise ValidationError(
            f"generator is not Hermitian (residual {hermitian_residual(h):.3e})"
        )
    # symmetrize away the sub-tolerance anti-Hermitian part before eigh
    eigenvalues, eigenvectors = scipy.linalg.eigh((h + adjoint(h)) / 2)
    phases = np.exp(1j * scale * eigenvalues)
    return UnitaryMatrix((eigenvectors * phases) @ adjoint(eigenvectors))


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _U64_LIMIT:
        raise ValidationError(f"seed {seed} is not a 64-bit unsigned integer")
    return seed


def make_rng(seed: SeedLike, *spawn_key: int) -> np.random.Generator:
    """
    Build a generator from a 64-bit seed and an optional spawn key.

    Distinct spawn keys give independent streams; the same (seed, key) always
    reproduces the same stream.
    """
    if isinstance(seed, np.random.Generator):
        if spawn_key:
            raise ValidationError("spawn keys apply to integer seeds only")
        return seed
    sequence = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(int(k) for k in spawn_key))
    return np.random.default_rng(sequence)


def derive_seed(seed: int, *spawn_key: int) -> int:
    """A child 64-bit seed for (seed, spawn_key)."""
    sequence = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(int(k) for k in spawn_key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def haar_random_special_unitary(n: int, seed: SeedLike) -> UnitaryMatrix:
    """
    Haar-random element of U(n), re-phased into SU(n).

    QR of a complex Ginibre matrix with the diagonal of R folded back into Q
    so the distribution is exactly Haar.

    Args:
        n: Dimension, at least 2
        seed: 64-bit seed or a generator carrying the sampling stream
    """
    if n < 2:
        raise ValidationError(f"Haar sampling needs n >= 2, got {n}")
    rng = make_rng(seed)
    ginibre = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = scipy.linalg.qr(ginibre)
    diagonal = np.diag(r)
    q = q * (diagonal / np.abs(diagonal))
    return UnitaryMatrix.special_from(q)


def _dimension_root(dim: int) -> int:
    root = int(round(np.sqrt(dim)))
    if root * root != dim:
        raise ValidationError(f"dimension {dim} is not a perfect square")
    return root


def partial_trace(rho: np.ndarray, subsystem: Subsystem, n: int) -> np.ndarray:
    """
    Trace the named subsystem out of an n^2 x n^2 density matrix.

    Args:
        rho: Hermitian, unit-trace matrix on the product space
        subsystem: The party to trace OUT
        n: Local dimension

    Returns:
        The n x n reduced density matrix of the other party
    """
    rho = as_complex_matrix(rho, "density matrix")
    if rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"density matrix must be square, got shape {rho.shape}")
    if _dimension_root(rho.shape[0]) != n:
        raise ValidationError(f"density matrix of size {rho.shape[0]} does not match n={n}")
    if hermitian_residual(rho) > HERMITIAN_TOL:
        raise ValidationError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TRACE_TOL:
        raise ValidationError(f"density matrix trace is {np.trace(rho).real:.12g}, expected 1")

    tensor = rho.reshape(n, n, n, n)
    if subsystem is Subsystem.A:
        reduced = np.einsum("ijil->jl", tensor)
    else:
        reduced = np.einsum("ijkj->ik", tensor)
    return freeze(reduced)


def gell_mann_basis(n: int) -> Sequence[np.ndarray]:
    """
    Generalized Gell-Mann matrices: an orthogonal traceless Hermitian basis of su(n).

    Ordering: symmetric off-diagonal, antisymmetric off-diagonal, then the
    n-1 diagonal generators diag(1,...,1,-k,0,...) / sqrt(k(k+1)/2).
    """
    symmetric, antisymmetric, diagonal = [], [], []
    for j in range(n):
        for k in range(j + 1, n):
            s = np.zeros((n, n), dtype=np.complex128)
            s[j, k] = s[k, j] = 1.0
            symmetric.append(freeze(s))
            a = np.zeros((n, n), dtype=np.complex128)
            a[j, k] = -1j
            a[k, j] = 1j
            antisymmetric.append(freeze(a))
    for k in range(1, n):
        d = np.zeros((n, n), dtype=np.complex128)
        d[np.arange(k), np.arange(k)] = 1.0
        d[k, k] = -k
        diagonal.append(freeze(d * np.sqrt(2.0 / (k * (k + 1)))))
    return symmetric + antisymmetric + diagonal


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    """
    Operator max-norm distance between a and b modulo a global phase.

    The phase is the one minimizing the Frobenius distance, arg tr(b^+ a).
    """
    overlap = np.trace(adjoint(b) @ a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(a - phase * b)))
