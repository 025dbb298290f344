"""Isotropy classes of bifurcating loops, their fixed subspaces and residual predicates."""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from dynamics import PreconditionError
from .group import GroupElement, spatial_matrix
from .loops import FourierLoop, loop_action_matrix

RESIDUAL_SAMPLES = 256
CHOREOGRAPHY_TOL = 1e-8

_KINDS = ('planar_z2', 'eight_z2', 'planar_znk', 'spatial_znk')


@dataclass(frozen=True)
class IsotropyLabel:
    """
    Symmetry class of a loop.

    planar_z2 and eight_z2 label satellite loops; planar_znk and spatial_znk
    label ring loops with isotropy generated by (zeta, zeta, -k zeta) together
    with kappa (planar) or (kappa, pi) (spatial).
    """

    kind: str
    n: Optional[int] = None
    k: Optional[int] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise PreconditionError(f"Unknown isotropy kind {self.kind!r}")
        if self.is_ring and (self.n is None or self.k is None or not 1 <= self.k <= self.n):
            raise PreconditionError(f"Ring isotropy needs 1 <= k <= n, got n={self.n}, k={self.k}")

    @classmethod
    def planar(cls) -> 'IsotropyLabel':
        return cls('planar_z2')

    @classmethod
    def eight(cls) -> 'IsotropyLabel':
        return cls('eight_z2')

    @classmethod
    def planar_ring(cls, n: int, k: int) -> 'IsotropyLabel':
        return cls('planar_znk', n, k)

    @classmethod
    def spatial_ring(cls, n: int, k: int) -> 'IsotropyLabel':
        return cls('spatial_znk', n, k)

    @property
    def is_ring(self) -> bool:
        return self.kind in ('planar_znk', 'spatial_znk')

    @property
    def hip_hop(self) -> bool:
        return self.kind == 'spatial_znk' and 2 * self.k == self.n

    @property
    def oscillating_ring(self) -> bool:
        return self.kind == 'spatial_znk' and self.k == self.n

    @property
    def dim(self) -> int:
        return 3 * (self.n + 1) if self.is_ring else 3

    @property
    def name(self) -> str:
        names = {
            'planar_z2': 'PlanarZ2',
            'eight_z2': 'EightZ2',
            'planar_znk': f'PlanarZnk({self.k})',
            'spatial_znk': f'SpatialZnk({self.k})',
        }
        return names[self.kind]

    def generators(self) -> List[GroupElement]:
        if self.kind == 'planar_z2':
            return [GroupElement(kappa=True)]
        if self.kind == 'eight_z2':
            return [GroupElement(kappa=True, phi=np.pi)]
        zeta = 2.0 * np.pi / self.n
        cyclic = GroupElement(j=1, theta=zeta, phi=-self.k * zeta)
        if self.kind == 'planar_znk':
            return [cyclic, GroupElement(kappa=True)]
        return [cyclic, GroupElement(kappa=True, phi=np.pi)]

    def elements(self) -> List[GroupElement]:
        """Every element of the (finite) isotropy group."""
        gens = self.generators()
        if self.is_ring:
            cyclic, flip = gens
            powers = [cyclic.power(m) for m in range(self.n)]
            return powers + [p * flip for p in powers]
        return [GroupElement(), gens[0]]


def _check_dim(loop: FourierLoop, label: IsotropyLabel) -> None:
    if loop.dim != label.dim:
        raise PreconditionError(f"Loop of dimension {loop.dim} does not match {label.name} (dimension {label.dim})")


def symmetry_residual(loop: FourierLoop, label: IsotropyLabel, samples: int = RESIDUAL_SAMPLES) -> float:
    """
    Largest deviation |rho(g) x(t + phi) - x(t)| over a time grid and the label's generators.

    Raises:
        PreconditionError: If the loop dimension does not match the label
    """
    _check_dim(loop, label)
    t = 2.0 * np.pi * np.arange(samples) / samples
    base = loop.evaluate(t)
    worst = 0.0
    for g in label.generators():
        S = spatial_matrix(g, loop.dim // 3)
        moved = loop.evaluate(t + g.phi) @ S.T
        worst = max(worst, float(np.max(np.linalg.norm(moved - base, axis=1))))
    return worst


def fixed_subspace_projector(label: IsotropyLabel, L: int, d: Optional[int] = None) -> np.ndarray:
    """
    Orthogonal projector onto loops fixed by the label, on flattened real coefficients.

    The projector is the group average of the (orthogonal) loop representation,
    hence symmetric and idempotent.
    """
    d = d or label.dim
    if d != label.dim:
        raise PreconditionError(f"Dimension {d} does not match {label.name}")
    elements = label.elements()
    size = (2 * L + 1) * d
    P = np.zeros((size, size))
    for g in elements:
        P += loop_action_matrix(g, L, d)
    P /= len(elements)
    return 0.5 * (P + P.T)


def fixed_subspace_basis(label: IsotropyLabel, L: int) -> np.ndarray:
    """Orthonormal columns spanning the range of the fixed-subspace projector."""
    P = fixed_subspace_projector(label, L)
    values, vectors = np.linalg.eigh(P)
    basis = vectors[:, values > 0.5]
    # sign convention: largest entry of each column positive
    pivots = np.argmax(np.abs(basis), axis=0)
    signs = np.sign(basis[pivots, np.arange(basis.shape[1])])
    return basis * signs


def choreography_indicator(loop: FourierLoop, k: int, cfg) -> Tuple[float, bool]:
    """
    Omega = 1 - k sqrt(omega) / nu and whether it lies in n Z.

    Ring loops with Omega in n Z are choreographies: all bodies follow one path.
    `cfg` is the ring the loop bifurcates from (anything with `n` and `omega`).
    """
    Omega = 1.0 - k * np.sqrt(cfg.omega) / loop.nu
    nearest = cfg.n * np.round(Omega / cfg.n)
    return float(Omega), bool(abs(Omega - nearest) < CHOREOGRAPHY_TOL)


def center_of_mass_defect(loop: FourierLoop, masses: np.ndarray, samples: int = RESIDUAL_SAMPLES) -> float:
    """Largest |sum_j m_j z_j(t)| over a time grid."""
    t = 2.0 * np.pi * np.arange(samples) / samples
    z = loop.evaluate(t)[:, 2::3]
    return float(np.max(np.abs(z @ np.asarray(masses))))
