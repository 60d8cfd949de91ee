"""Dense complex-matrix helpers for 2-, 4- and 16-dimensional quantum objects.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; the
functions here add the shape and finiteness checks the rest of the package
relies on.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

DEFAULT_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array, raising ``ValueError`` otherwise."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def kron(*mats) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    if not mats:
        raise ValueError("kron needs at least one matrix")
    return reduce(np.kron, (as_matrix(m) for m in mats))


def trace(a) -> complex:
    return complex(np.trace(_square(a)))


def matmul(a, b) -> np.ndarray:
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape[1] != mb.shape[0]:
        raise ValueError(f"inner dimensions differ: {ma.shape} @ {mb.shape}")
    return ma @ mb


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def projector(ket) -> np.ndarray:
    """|k><k| for a column vector ``ket``."""
    k = as_matrix(ket)
    return k @ k.conj().T


@dataclass(frozen=True)
class HermitianCheck:
    is_hermitian: bool
    max_asymmetry: float
    is_psd: bool
    min_eigenvalue: float


def check_hermitian_psd(a, tol: float = DEFAULT_TOL) -> HermitianCheck:
    """Report Hermiticity and positive semidefiniteness of a square matrix.

    The PSD verdict uses the smallest eigenvalue of the Hermitian part, so it
    is meaningful even when ``is_hermitian`` is false.
    """
    m = _square(a)
    asym = float(np.max(np.abs(m - m.conj().T)))
    herm = 0.5 * (m + m.conj().T)
    lo = float(np.linalg.eigvalsh(herm)[0])
    return HermitianCheck(
        is_hermitian=asym <= tol,
        max_asymmetry=asym,
        is_psd=asym <= tol and lo >= -tol,
        min_eigenvalue=lo,
    )
