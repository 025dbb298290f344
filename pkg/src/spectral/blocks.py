"""Hermitian mode matrices M(nu) = nu^2 M - 2 i nu c K + H and their symmetry blocks."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional

import numpy as np

from dynamics import J, nbody_hess
from equilibria import EquilibriumPoint, RingConfiguration
from symmetry import IsotropyLabel, dft_block_diagonalize, isotypic_basis

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralBlock:
    """
    One block of the mode-one linearization, M_b(nu) = nu^2 mass - 2 nu c coriolis + stiffness.

    `coriolis` is stored in Hermitian form (i K restricted to the block), so the
    block matrix is Hermitian for every real nu. `deflation` holds block-coordinate
    vectors that are exact eigenvectors for every nu and are removed before
    counting negative eigenvalues.
    """

    key: Hashable
    kind: str
    mass: np.ndarray
    coriolis: np.ndarray
    stiffness: np.ndarray
    speed: float = 1.0
    k: Optional[int] = None
    label: Optional[IsotropyLabel] = None
    deflation: List[np.ndarray] = field(default_factory=list, repr=False)
    basis: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.stiffness.shape[0]

    @property
    def name(self) -> str:
        return self.key if isinstance(self.key, str) else f"{self.key[1]}_k{self.key[0]}"

    def matrix(self, nu: float) -> np.ndarray:
        return nu ** 2 * self.mass - 2.0 * nu * self.speed * self.coriolis + self.stiffness

    def matrices(self, nus: np.ndarray) -> np.ndarray:
        """Stacked block matrices for a grid of frequencies, shape (len(nus), s, s)."""
        nus = np.asarray(nus, dtype=float)[:, None, None]
        return nus ** 2 * self.mass - 2.0 * nus * self.speed * self.coriolis + self.stiffness

    def nu_max(self) -> float:
        """
        Frequency beyond which the block is positive definite.

        2 sqrt(largest mass-normalized stiffness magnitude) + 2 c + 1; the 2 c term
        covers the Coriolis coupling.
        """
        scale = np.sqrt(np.maximum(np.real(np.diag(self.mass)), 1e-300))
        normalized = self.stiffness / np.outer(scale, scale)
        top = float(np.max(np.abs(np.linalg.eigvalsh(normalized)))) if self.size else 0.0
        return 2.0 * np.sqrt(top) + 2.0 * self.speed + 1.0


def satellite_block(eq: EquilibriumPoint, nu: float) -> np.ndarray:
    """
    M(nu) = nu^2 I - 2 i nu diag(J, 0) + D^2 V(x0) at a satellite equilibrium.

    The planar 2x2 part is V0 and the z entry is V1; they never couple.
    """
    gen = np.zeros((3, 3))
    gen[:2, :2] = J
    return nu ** 2 * np.eye(3) - 2.0j * nu * gen + eq.hessian


def satellite_blocks(eq: EquilibriumPoint) -> List[SpectralBlock]:
    """The planar (V0) and spatial (V1) blocks as frequency-dependent builders."""
    hess = np.asarray(eq.hessian)
    planar = SpectralBlock(
        key='V0',
        kind='planar',
        mass=np.eye(2, dtype=complex),
        coriolis=(1j * J).astype(complex),
        stiffness=hess[:2, :2].astype(complex),
        label=IsotropyLabel.planar(),
        basis=np.eye(3)[:, :2].astype(complex),
    )
    spatial = SpectralBlock(
        key='V1',
        kind='spatial',
        mass=np.eye(1, dtype=complex),
        coriolis=np.zeros((1, 1), dtype=complex),
        stiffness=hess[2:, 2:].astype(complex),
        label=IsotropyLabel.eight(),
        basis=np.eye(3)[:, 2:].astype(complex),
    )
    return [planar, spatial]


def _ring_operators(cfg: RingConfiguration):
    """Mass, Hermitian Coriolis and stiffness matrices on the bodies that carry mass."""
    sys = cfg.body_system()
    hess = nbody_hess(cfg.configuration, sys)
    mass = sys.mass_matrix
    coriolis = 1j * sys.coriolis_matrix
    include_center = cfg.mu > 0
    if not include_center:
        hess, mass, coriolis = hess[3:, 3:], mass[3:, 3:], coriolis[3:, 3:]
    return mass, coriolis, hess, include_center


def mode_matrix(cfg: RingConfiguration, nu: float, l: int = 1) -> np.ndarray:
    """Dense mode-l matrix (l nu)^2 M - 2 i l nu sqrt(omega) K + H at the ring."""
    mass, coriolis, hess, _ = _ring_operators(cfg)
    w = l * nu
    return w ** 2 * mass - 2.0 * w * np.sqrt(cfg.omega) * coriolis + hess


def ring_blocks(cfg: RingConfiguration, nu: float, l: int = 1):
    """
    Block-diagonalize the dense mode-l matrix at the ring.

    Returns:
        BlockDecomposition with 2n blocks keyed (k, 'planar' | 'spatial')
    """
    A = mode_matrix(cfg, nu, l)
    return dft_block_diagonalize(A, cfg.n, include_center=cfg.mu > 0, split_kappa=True)


def _tilt_vectors(cfg: RingConfiguration, include_center: bool) -> List[np.ndarray]:
    """Infinitesimal rotations about in-plane axes: z_j = <a_j, e>."""
    pos = cfg.positions if include_center else cfg.positions[1:]
    out = []
    for axis in (0, 1):
        v = np.zeros(3 * len(pos))
        v[2::3] = pos[:, axis]
        if np.linalg.norm(v) > 1e-12:
            out.append(v / np.linalg.norm(v))
    return out


def ring_spectral_blocks(cfg: RingConfiguration) -> List[SpectralBlock]:
    """
    Frequency-dependent builders for the 2n ring blocks.

    Spatial blocks for k = 1 and k = n-1 carry the tilt of the ring plane, an
    exact eigenvector with eigenvalue nu^2 - omega at every frequency; it is
    attached as deflation data.
    """
    mass, coriolis, hess, include_center = _ring_operators(cfg)
    bases = isotypic_basis(cfg.n, include_center)
    tilts = _tilt_vectors(cfg, include_center)
    blocks: List[SpectralBlock] = []
    for (k, kind), U in bases.items():
        if not U.shape[1]:
            continue
        H = U.conj().T @ hess @ U
        deflation: List[np.ndarray] = []
        if kind == 'spatial':
            for v in tilts:
                xi = U.conj().T @ v
                if np.linalg.norm(xi) > 1e-12 and not any(abs(np.vdot(d, xi)) > 1e-8 for d in deflation):
                    deflation.append(xi / np.linalg.norm(xi))
        label = IsotropyLabel.planar_ring(cfg.n, k) if kind == 'planar' else IsotropyLabel.spatial_ring(cfg.n, k)
        blocks.append(SpectralBlock(
            key=(k, kind),
            kind=kind,
            mass=U.conj().T @ mass @ U,
            coriolis=U.conj().T @ coriolis @ U,
            stiffness=0.5 * (H + H.conj().T),
            speed=float(np.sqrt(cfg.omega)),
            k=k,
            label=label,
            deflation=deflation,
            basis=U,
        ))
    logger.debug(f"Built {len(blocks)} ring blocks for n={cfg.n}, mu={cfg.mu}")
    return blocks


def blocks_by_key(blocks: List[SpectralBlock]) -> Dict[Hashable, SpectralBlock]:
    return {b.key: b for b in blocks}


def harmonic_lookup(blocks: List[SpectralBlock], block: SpectralBlock):
    """
    Map a harmonic l >= 2 to the block holding mode l of `block`'s fixed subspace.

    Mode l of a Z~n(k) loop lives in W_{lk mod n}. Under kappa it stays planar
    (planar classes) or alternates: odd harmonics spatial, even ones planar
    (eight and spatial ring classes).
    """
    table = blocks_by_key(blocks)
    label = block.label

    def lookup(l: int) -> Optional[SpectralBlock]:
        if label is None:
            return None
        if label.kind == 'planar_z2':
            return table.get('V0')
        if label.kind == 'eight_z2':
            return table.get('V1' if l % 2 else 'V0')
        k = (l * label.k) % label.n or label.n
        if label.kind == 'planar_znk':
            return table.get((k, 'planar'))
        return table.get((k, 'spatial' if l % 2 else 'planar'))

    return lookup
