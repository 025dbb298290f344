"""Closed-form Maxwell ring relative equilibrium."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from dynamics import EPS_COLL, BodySystem, PreconditionError, SatelliteSystem, satellite_from_ring

logger = logging.getLogger(__name__)


def ring_sum(n: int) -> float:
    """s1 = (1/4) sum_{j=1}^{n-1} 1 / sin(j zeta / 2)."""
    zeta = 2.0 * np.pi / n
    j = np.arange(1, n)
    return 0.25 * math.fsum(1.0 / np.sin(j * zeta / 2.0))


@dataclass(frozen=True)
class RingConfiguration:
    """
    n unit masses on the unit circle around a central mass mu, rotating at sqrt(omega).

    Index 0 is the central body; ring body j sits at (cos j zeta, sin j zeta).
    """

    n: int
    mu: float
    s1: float
    omega: float
    positions: np.ndarray = field(repr=False)
    masses: np.ndarray = field(repr=False)

    @property
    def zeta(self) -> float:
        return 2.0 * np.pi / self.n

    @property
    def configuration(self) -> np.ndarray:
        """Stacked (u_j, z_j) vector of length 3(n+1)."""
        return np.column_stack([self.positions, np.zeros(self.n + 1)]).reshape(-1)

    def body_system(self, eps_coll: float = EPS_COLL) -> BodySystem:
        return BodySystem(masses=self.masses, omega=self.omega, eps_coll=eps_coll)

    def satellite_system(self, eps_coll: float = EPS_COLL) -> SatelliteSystem:
        """
        Satellite over the ring in its own time unit.

        Primaries are the ring bodies plus the centre when mu > 0, masses are
        divided by omega and time is measured in units of 1/sqrt(omega), which
        brings the satellite equation to unit frame speed.
        """
        return satellite_from_ring(self.positions, self.masses, self.omega, eps_coll)


def maxwell_ring(n: int, mu: float) -> RingConfiguration:
    """
    Build the Maxwell ring with omega = mu + s1.

    Raises:
        PreconditionError: If n < 2 or mu < 0
    """
    if int(n) != n or n < 2:
        raise PreconditionError(f"A Maxwell ring needs n >= 2 bodies, got {n}")
    if mu < 0:
        raise PreconditionError(f"Central mass must be non-negative, got {mu}")
    n = int(n)
    s1 = ring_sum(n)
    angles = 2.0 * np.pi * np.arange(1, n + 1) / n
    positions = np.vstack([[0.0, 0.0], np.column_stack([np.cos(angles), np.sin(angles)])])
    masses = np.concatenate([[float(mu)], np.ones(n)])
    cfg = RingConfiguration(n=n, mu=float(mu), s1=s1, omega=float(mu) + s1, positions=positions, masses=masses)
    logger.debug(f"Maxwell ring n={n}, mu={mu}: s1={s1!r}, omega={cfg.omega!r}")
    return cfg


def ring_residual(cfg: RingConfiguration) -> float:
    """max_j | omega a_j - sum_{i != j} m_i (a_j - a_i) / |a_j - a_i|^3 |."""
    a = np.asarray(cfg.positions, dtype=float)
    diff = a[:, None, :] - a[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(dist, np.inf)
    pull = np.sum(cfg.masses[None, :, None] * diff / dist[..., None] ** 3, axis=1)
    return float(np.max(np.linalg.norm(cfg.omega * a - pull, axis=1)))


def polygon_pattern(n: int, k: int):
    """
    Shape of a relative equilibrium bifurcating in the k-th block.

    With h = gcd(k, n) the bodies group into n/h regular h-gons.

    Returns:
        Tuple (number of polygons, vertices per polygon)
    """
    if not 1 <= k <= n:
        raise PreconditionError(f"k must lie in 1..{n}, got {k}")
    h = math.gcd(k, n)
    return n // h, h
