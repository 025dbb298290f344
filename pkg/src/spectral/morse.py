"""Morse index of Hermitian matrices with known kernels removed."""

from typing import Optional, Sequence

import numpy as np

from dynamics import DomainError

ZERO_TOL = 1e-10


class AtCrossingError(DomainError):
    """An undeflated eigenvalue sits inside the zero band."""

    def __init__(self, message: str, eigenvalue: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue


def complement_basis(size: int, deflation: Optional[Sequence[np.ndarray]]) -> Optional[np.ndarray]:
    """Orthonormal basis of the orthogonal complement of the deflation vectors (None if nothing to remove)."""
    if not deflation:
        return None
    V = np.column_stack([np.asarray(v, dtype=complex) for v in deflation])
    Q, _ = np.linalg.qr(V, mode='complete')
    return Q[:, V.shape[1]:] if Q.shape[1] > V.shape[1] else np.zeros((size, 0), dtype=complex)


def compress(A: np.ndarray, complement: Optional[np.ndarray]) -> np.ndarray:
    if complement is None:
        return A
    return complement.conj().T @ A @ complement


def morse_index(A: np.ndarray, deflation: Optional[Sequence[np.ndarray]] = None, zero_tol: float = ZERO_TOL) -> int:
    """
    Number of eigenvalues below -zero_tol after removing the deflation directions.

    Raises:
        AtCrossingError: If an eigenvalue remains within zero_tol of zero
    """
    A = np.asarray(A)
    reduced = compress(A, complement_basis(A.shape[0], deflation))
    if reduced.size == 0:
        return 0
    values = np.linalg.eigvalsh(reduced)
    near = np.abs(values) <= zero_tol
    if near.any():
        value = float(values[near][0])
        raise AtCrossingError(f"Eigenvalue {value:.3e} inside the zero band {zero_tol:.1e}", value)
    return int(np.sum(values < -zero_tol))
