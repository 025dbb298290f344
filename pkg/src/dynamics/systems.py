"""Immutable descriptions of the satellite and ring n-body systems."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CollisionError, PreconditionError

# Collision tolerance in configuration units.
EPS_COLL = 1e-9

# Counter-clockwise generator of planar rotations.
J = np.array([[0.0, -1.0], [1.0, 0.0]])


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def frame_generator(bodies: int) -> np.ndarray:
    """Block-diagonal diag(J, 0) acting on `bodies` stacked (u, z) triples."""
    block = np.zeros((3, 3))
    block[:2, :2] = J
    return np.kron(np.eye(bodies), block)


def rotation_generator(bodies: int) -> np.ndarray:
    """Infinitesimal generator A1 of the action u -> exp(-J theta) u."""
    return -frame_generator(bodies)


def planar_rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class SatelliteSystem:
    """
    A massless satellite moving among fixed primaries in a frame of unit speed.

    Attributes:
        anchors: Planar primary positions, shape (m, 2)
        masses: Positive primary masses, shape (m,)
        eps_coll: Collision tolerance
        time_scale: Factor relating this time to the time of the system it was
            derived from (sqrt(omega) for a satellite over a Maxwell ring)
    """

    anchors: np.ndarray
    masses: np.ndarray
    eps_coll: float = EPS_COLL
    time_scale: float = 1.0

    def __post_init__(self):
        anchors = _frozen(self.anchors).reshape(-1, 2)
        masses = _frozen(self.masses).reshape(-1)
        if len(anchors) != len(masses) or len(masses) == 0:
            raise PreconditionError(
                f"Need one mass per anchor, got {len(anchors)} anchors and {len(masses)} masses"
            )
        if np.any(masses <= 0):
            raise PreconditionError("Primary masses must be strictly positive")
        gaps = np.linalg.norm(anchors[:, None, :] - anchors[None, :, :], axis=-1)
        np.fill_diagonal(gaps, np.inf)
        if np.any(gaps < self.eps_coll):
            raise PreconditionError("Primary anchors must be pairwise distinct")
        object.__setattr__(self, 'anchors', anchors)
        object.__setattr__(self, 'masses', masses)

    @property
    def dim(self) -> int:
        return 3

    @property
    def points(self) -> np.ndarray:
        """Anchors lifted to space, shape (m, 3)."""
        return np.column_stack([self.anchors, np.zeros(len(self.anchors))])

    def min_distance(self, positions: np.ndarray) -> float:
        """Smallest satellite-primary distance over a batch of positions (..., 3)."""
        pos = np.asarray(positions, dtype=float).reshape(-1, 3)
        gaps = np.linalg.norm(pos[:, None, :] - self.points[None, :, :], axis=-1)
        return float(gaps.min())


@dataclass(frozen=True)
class BodySystem:
    """
    A central body and n ring bodies in a frame rotating at speed sqrt(omega).

    Attributes:
        masses: m_0 (central, may be zero) followed by m_1..m_n
        omega: Squared frame speed
        eps_coll: Collision tolerance
    """

    masses: np.ndarray
    omega: float
    eps_coll: float = EPS_COLL

    def __post_init__(self):
        masses = _frozen(self.masses).reshape(-1)
        if len(masses) < 3:
            raise PreconditionError("A body system needs a central slot and at least two ring bodies")
        if masses[0] < 0 or np.any(masses[1:] <= 0):
            raise PreconditionError("Ring masses must be positive and the central mass non-negative")
        if not self.omega > 0:
            raise PreconditionError(f"Frame speed omega must be positive, got {self.omega}")
        object.__setattr__(self, 'masses', masses)

    @property
    def n(self) -> int:
        return len(self.masses) - 1

    @property
    def bodies(self) -> int:
        return len(self.masses)

    @property
    def dim(self) -> int:
        return 3 * self.bodies

    @property
    def mass_matrix(self) -> np.ndarray:
        return np.diag(np.repeat(self.masses, 3))

    @property
    def coriolis_matrix(self) -> np.ndarray:
        """K = M diag(J, 0), skew-symmetric."""
        return self.mass_matrix @ frame_generator(self.bodies)

    def pairs(self):
        """All index pairs i < j."""
        return [(i, j) for i in range(self.bodies) for j in range(i + 1, self.bodies)]

    def min_distance(self, positions: np.ndarray) -> float:
        """Smallest pairwise body distance over a batch (..., 3(n+1))."""
        pos = np.asarray(positions, dtype=float).reshape(-1, self.bodies, 3)
        best = np.inf
        for i, j in self.pairs():
            best = min(best, float(np.linalg.norm(pos[:, i] - pos[:, j], axis=-1).min()))
        return best


@dataclass(frozen=True)
class State:
    """Position and velocity, both stacked as (u_j, z_j) triples."""

    position: np.ndarray
    velocity: np.ndarray = field(default=None)

    def __post_init__(self):
        position = _frozen(self.position).reshape(-1)
        velocity = np.zeros_like(position) if self.velocity is None else _frozen(self.velocity).reshape(-1)
        if position.shape != velocity.shape or len(position) % 3:
            raise PreconditionError(
                f"Position and velocity must have equal length divisible by 3, "
                f"got {position.shape} and {velocity.shape}"
            )
        velocity.setflags(write=False)
        object.__setattr__(self, 'position', position)
        object.__setattr__(self, 'velocity', velocity)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.position, self.velocity])

    @classmethod
    def from_vector(cls, y: np.ndarray) -> 'State':
        half = len(y) // 2
        return cls(y[:half], y[half:])


def check_collision(distance: float, eps_coll: float, where: Optional[str] = None) -> None:
    """Raise CollisionError when `distance` is inside the collision neighbourhood."""
    if distance < eps_coll:
        suffix = f" ({where})" if where else ""
        raise CollisionError(f"Collision set reached: distance {distance:.3e} < {eps_coll:.1e}{suffix}", distance)
