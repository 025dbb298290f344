"""Energy, angular momentum and the inertial-frame reconstruction."""

from typing import Union

import numpy as np

from .errors import PreconditionError
from .nbody import nbody_potential
from .satellite import satellite_potential
from .systems import BodySystem, SatelliteSystem, State, planar_rotation

System = Union[SatelliteSystem, BodySystem]


def _weights_and_speed(sys: System):
    """Per-coordinate masses and frame speed."""
    if isinstance(sys, BodySystem):
        return np.repeat(sys.masses, 3), float(np.sqrt(sys.omega))
    return np.ones(3), 1.0


def potential(x: np.ndarray, sys: System):
    if isinstance(sys, BodySystem):
        return nbody_potential(x, sys)
    return satellite_potential(x, sys)


def energy(s: State, nu: float, sys: System) -> float:
    """
    Conserved quantity E = -nu^2 |x'|_M^2 / 2 + V(x) of the rescaled equations.

    Raises:
        CollisionError: If the state lies in the collision set
    """
    weights, _ = _weights_and_speed(sys)
    kinetic = 0.5 * nu ** 2 * float(np.sum(weights * s.velocity ** 2))
    return float(potential(s.position, sys)) - kinetic


def jacobi_constant(s: State, nu: float, sys: SatelliteSystem) -> float:
    """Satellite energy E under its classical name; same sign and scale as `energy`."""
    if not isinstance(sys, SatelliteSystem):
        raise PreconditionError(f"Jacobi constant is defined for satellite systems, got {type(sys).__name__}")
    return energy(s, nu, sys)


def angular_momentum(s: State, sys: System, nu: float = 1.0) -> float:
    """
    Inertial angular momentum about the z-axis, sum m (nu u x u' + c |u|^2).

    The c |u|^2 term is the frame contribution, c being the frame speed. It is
    conserved for the n-body equations; for the satellite it is reported only.
    """
    weights, speed = _weights_and_speed(sys)
    masses = weights[::3]
    u = s.position.reshape(-1, 3)[:, :2]
    du = s.velocity.reshape(-1, 3)[:, :2]
    cross = u[:, 0] * du[:, 1] - u[:, 1] * du[:, 0]
    return float(np.sum(masses * (nu * cross + speed * np.sum(u ** 2, axis=1))))


def inertial_positions(positions: np.ndarray, sys: System, t: float, nu: float = 1.0) -> np.ndarray:
    """Map rotating-frame positions at rescaled time t to the fixed frame, q = exp(c J t / nu) u."""
    _, speed = _weights_and_speed(sys)
    rot = planar_rotation(speed * t / nu)
    pos = np.asarray(positions, dtype=float).reshape(-1, 3).copy()
    pos[:, :2] = pos[:, :2] @ rot.T
    return pos.reshape(np.shape(positions))


def inertial_velocities(s: State, sys: System, t: float, nu: float = 1.0) -> np.ndarray:
    """Physical-time velocities in the fixed frame, exp(cJt/nu) (nu u' + c J u)."""
    _, speed = _weights_and_speed(sys)
    u = s.position.reshape(-1, 3)
    du = s.velocity.reshape(-1, 3)
    out = nu * du.copy()
    out[:, 0] -= speed * u[:, 1]
    out[:, 1] += speed * u[:, 0]
    return inertial_positions(out, sys, t, nu).reshape(-1)


def linear_momentum(s: State, sys: BodySystem, t: float, nu: float = 1.0) -> np.ndarray:
    """Total inertial linear momentum of an n-body state."""
    v = inertial_velocities(s, sys, t, nu).reshape(-1, 3)
    return np.sum(sys.masses[:, None] * v, axis=0)
