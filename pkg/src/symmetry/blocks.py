"""Isotypic change of variables that block-diagonalizes Z_n-equivariant matrices."""

import logging
from dataclasses import dataclass
from typing import Dict, Hashable, List, Tuple

import numpy as np

from dynamics import PreconditionError, planar_rotation
from .group import GroupElement, spatial_matrix

logger = logging.getLogger(__name__)


class EquivarianceError(PreconditionError):
    """A matrix does not commute with the twisted cyclic action."""

    def __init__(self, message: str, commutator: float):
        super().__init__(message)
        self.commutator = commutator


@dataclass(frozen=True)
class BlockDecomposition:
    """Hermitian blocks keyed by isotypic index k (or (k, 'planar'/'spatial'))."""

    blocks: Dict[Hashable, np.ndarray]
    bases: Dict[Hashable, np.ndarray]
    commutator: float
    leakage: float

    def eigenvalues(self) -> np.ndarray:
        """Sorted union of all block spectra."""
        return np.sort(np.concatenate([np.linalg.eigvalsh(b) for b in self.blocks.values() if b.size]))


def twisted_generator(n: int, include_center: bool = True) -> np.ndarray:
    """Matrix of (zeta, zeta): x_i -> exp(-J zeta) x_{i+1}."""
    bodies = n + 1 if include_center else n
    return spatial_matrix(GroupElement(j=1, theta=2.0 * np.pi / n), bodies, include_center)


def _central_planar(n: int) -> Dict[int, List[np.ndarray]]:
    """Eigenvectors of exp(-J zeta) on the central body's plane, keyed by k."""
    if n == 2:
        return {1: [np.array([1.0, 0.0]), np.array([0.0, 1.0])]}
    return {
        1: [np.array([1.0, 1.0j]) / np.sqrt(2.0)],
        n - 1: [np.array([1.0, -1.0j]) / np.sqrt(2.0)],
    }


def isotypic_basis(n: int, include_center: bool = True) -> Dict[Tuple[int, str], np.ndarray]:
    """
    Orthonormal bases of the eigenspaces W_k of the twisted generator.

    Ring columns are x_j = exp(i k j zeta) rot(j zeta) w / sqrt(n) for w in
    {e_x, e_y} (planar) or e_z (spatial). Central planar directions join k = 1
    and k = n-1, the central z direction joins k = n.

    Returns:
        Mapping (k, 'planar' | 'spatial') -> complex matrix with one column per basis vector
    """
    zeta = 2.0 * np.pi / n
    offset = 1 if include_center else 0
    dim = 3 * (n + offset)
    central = _central_planar(n)
    bases: Dict[Tuple[int, str], np.ndarray] = {}
    for k in range(1, n + 1):
        planar: List[np.ndarray] = []
        for w in (np.array([1.0, 0.0]), np.array([0.0, 1.0])):
            col = np.zeros(dim, dtype=complex)
            for j in range(1, n + 1):
                slot = 3 * (offset + j - 1)
                col[slot:slot + 2] = np.exp(1j * k * j * zeta) * (planar_rotation(j * zeta) @ w) / np.sqrt(n)
            planar.append(col)
        if include_center:
            for v in central.get(k, []):
                col = np.zeros(dim, dtype=complex)
                col[:2] = v
                planar.append(col)
        spatial: List[np.ndarray] = []
        col = np.zeros(dim, dtype=complex)
        for j in range(1, n + 1):
            col[3 * (offset + j - 1) + 2] = np.exp(1j * k * j * zeta) / np.sqrt(n)
        spatial.append(col)
        if include_center and k == n:
            col = np.zeros(dim, dtype=complex)
            col[2] = 1.0
            spatial.append(col)
        bases[(k, 'planar')] = np.column_stack(planar)
        bases[(k, 'spatial')] = np.column_stack(spatial)
    return bases


def equivariance_defect(A: np.ndarray, n: int, include_center: bool = True) -> float:
    """Largest entry of the commutator between A and the twisted generator."""
    G = twisted_generator(n, include_center)
    return float(np.max(np.abs(G @ A - A @ G)))


def dft_block_diagonalize(
    A: np.ndarray,
    n: int,
    include_center: bool = True,
    split_kappa: bool = False,
    check_tol: float = 1e-10,
    leak_tol: float = 1e-9,
) -> BlockDecomposition:
    """
    Conjugate A by the isotypic unitary and read off its diagonal blocks.

    Args:
        A: Hermitian matrix on 3(n+1) (or 3n without centre) coordinates
        n: Number of ring bodies
        include_center: Whether the first triple is the central body
        split_kappa: Also split every W_k into planar and spatial parts
        check_tol: Tolerance on the commutator with the twisted generator
        leak_tol: Tolerance on entries outside the block pattern, relative to max(1, |A|)

    Returns:
        BlockDecomposition keyed by k, or by (k, kind) when split_kappa is set

    Raises:
        PreconditionError: If the dimension does not match n
        EquivarianceError: If A does not commute with the action or the blocks leak
    """
    A = np.asarray(A)
    dim = 3 * (n + (1 if include_center else 0))
    if A.shape != (dim, dim):
        raise PreconditionError(f"Expected a {dim}x{dim} matrix for n={n}, got {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))))
    commutator = equivariance_defect(A, n, include_center)
    if commutator > check_tol * scale:
        raise EquivarianceError(f"Matrix is not Z_n-equivariant: commutator norm {commutator:.3e}", commutator)

    parts = isotypic_basis(n, include_center)
    if split_kappa:
        bases = {key: U for key, U in parts.items() if U.shape[1]}
    else:
        bases = {k: np.hstack([parts[(k, 'planar')], parts[(k, 'spatial')]]) for k in range(1, n + 1)}
    keys = list(bases)
    U = np.hstack([bases[key] for key in keys])
    full = U.conj().T @ A @ U
    mask = np.zeros(full.shape, dtype=bool)
    blocks: Dict[Hashable, np.ndarray] = {}
    start = 0
    for key in keys:
        stop = start + bases[key].shape[1]
        block = full[start:stop, start:stop]
        blocks[key] = 0.5 * (block + block.conj().T)
        mask[start:stop, start:stop] = True
        start = stop
    leakage = float(np.max(np.abs(full[~mask]))) if (~mask).any() else 0.0
    if leakage > leak_tol * scale:
        raise EquivarianceError(f"Block pattern leaks: off-block entry {leakage:.3e}", leakage)
    logger.debug(f"Block-diagonalized {dim}x{dim} matrix into {len(blocks)} blocks (leakage {leakage:.1e})")
    return BlockDecomposition(blocks=blocks, bases=bases, commutator=commutator, leakage=leakage)
