"""
elw-lab - Matrix Codec

Complex matrices travel through configs and reports as flat lists of reals,
row-major, real and imaginary parts interleaved.
"""
import math
from typing import List, Sequence

import numpy as np

from settings import CSV_SIGNIFICANT_DIGITS
from engine.errors import ValidationError


def encode_matrix(matrix: np.ndarray) -> List[float]:
    """[re(m00), im(m00), re(m01), im(m01), ...]."""
    flat = np.asarray(matrix, dtype=np.complex128).reshape(-1)
    out = []
    for value in flat:
        out.append(float(value.real))
        out.append(float(value.imag))
    return out


def decode_matrix(values: Sequence[float], n: int) -> np.ndarray:
    """
    Inverse of encode_matrix for an n x n matrix.

    Raises:
        ValidationError: on a wrong count, non-numeric or non-finite entries
    """
    if len(values) != 2 * n * n:
        raise ValidationError(f"expected {2 * n * n} reals for a {n}x{n} complex matrix, got {len(values)}")
    if any(isinstance(v, (bool, str)) for v in values):
        raise ValidationError("matrix entries must be numbers")
    try:
        reals = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"matrix entries must be numbers: {exc}") from exc
    if reals.ndim != 1:
        raise ValidationError("matrix must be a flat list of reals")
    if not np.all(np.isfinite(reals)):
        raise ValidationError("matrix entries must be finite")
    return (reals[0::2] + 1j * reals[1::2]).reshape(n, n)


def format_real(value: float) -> str:
    """CSV rendering with enough significant digits to round-trip a double."""
    if math.isnan(value) or math.isinf(value):
        raise ValidationError(f"cannot serialize non-finite value {value}")
    return format(float(value), f".{CSV_SIGNIFICANT_DIGITS}g")


def real_table(matrix: np.ndarray) -> List[List[float]]:
    """A real matrix as nested Python floats, for JSON."""
    return [[float(x) for x in row] for row in np.asarray(matrix, dtype=np.float64)]
