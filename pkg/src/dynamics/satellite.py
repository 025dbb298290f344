"""Amended satellite potential V(u, z) = |u|^2/2 + sum_j m_j / |(u, z) - (a_j, 0)| and its field."""

import numpy as np

from .systems import SatelliteSystem, State, check_collision, frame_generator

_PLANAR = np.diag([1.0, 1.0, 0.0])


def _offsets(p, sys: SatelliteSystem):
    """Offsets to every primary and their lengths, guarded against collisions."""
    pos = np.asarray(p, dtype=float)
    diff = pos[..., None, :] - sys.points
    dist = np.linalg.norm(diff, axis=-1)
    check_collision(float(dist.min()), sys.eps_coll, "satellite-primary")
    return pos, diff, dist


def satellite_potential(p: np.ndarray, sys: SatelliteSystem):
    """
    Evaluate V at one point (3,) or a batch (..., 3).

    Raises:
        CollisionError: If a point lies within eps_coll of a primary
    """
    pos, _, dist = _offsets(p, sys)
    return 0.5 * np.sum(pos[..., :2] ** 2, axis=-1) + np.sum(sys.masses / dist, axis=-1)


def satellite_grad(p: np.ndarray, sys: SatelliteSystem) -> np.ndarray:
    pos, diff, dist = _offsets(p, sys)
    pull = np.sum((sys.masses / dist ** 3)[..., None] * diff, axis=-2)
    return pos @ _PLANAR - pull


def satellite_hess(p: np.ndarray, sys: SatelliteSystem) -> np.ndarray:
    """Analytic Hessian, symmetric bit for bit: each outer product is formed before it is weighted."""
    _, diff, dist = _offsets(p, sys)
    w3 = sys.masses / dist ** 3
    w5 = 3.0 * sys.masses / dist ** 5
    outer = np.sum(w5[..., None, None] * (diff[..., :, None] * diff[..., None, :]), axis=-3)
    return _PLANAR + outer - np.sum(w3, axis=-1)[..., None, None] * np.eye(3)


def spatial_stiffness(p: np.ndarray, sys: SatelliteSystem) -> float:
    """d^2V/dz^2 at a planar point, -sum_j m_j / r_j^3."""
    _, _, dist = _offsets(p, sys)
    return float(-np.sum(sys.masses / dist ** 3))


def satellite_field(s: State, nu: float, sys: SatelliteSystem):
    """
    First-order form of nu^2 x'' + 2 nu diag(J, 0) x' = grad V(x).

    Args:
        s: Satellite state (rescaled time)
        nu: Frequency; nu = 1 gives the unscaled equation

    Returns:
        Tuple (velocity, acceleration)
    """
    accel = (satellite_grad(s.position, sys) - 2.0 * nu * frame_generator(1) @ s.velocity) / nu ** 2
    return s.velocity.copy(), accel


def satellite_from_ring(anchors: np.ndarray, masses: np.ndarray, omega: float, eps_coll: float) -> SatelliteSystem:
    """Satellite among ring bodies with masses divided by omega and time measured in units of 1/sqrt(omega)."""
    keep = masses > 0
    return SatelliteSystem(
        anchors=np.asarray(anchors)[keep],
        masses=np.asarray(masses)[keep] / omega,
        eps_coll=eps_coll,
        time_scale=float(np.sqrt(omega)),
    )
