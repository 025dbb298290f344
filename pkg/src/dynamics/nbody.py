"""Rotating-frame potential U(x) = omega sum m_j |u_j|^2 / 2 + sum_{i<j} m_i m_j / |x_i - x_j|."""

import numpy as np

from .systems import BodySystem, State, check_collision, frame_generator

_PLANAR = np.diag([1.0, 1.0, 0.0])


def _bodies(x, sys: BodySystem) -> np.ndarray:
    pos = np.asarray(x, dtype=float)
    if pos.shape[-1] != sys.dim:
        raise ValueError(f"Expected {sys.dim} coordinates, got {pos.shape[-1]}")
    return pos.reshape(pos.shape[:-1] + (sys.bodies, 3))


def _pair_geometry(pos: np.ndarray, sys: BodySystem):
    for i, j in sys.pairs():
        diff = pos[..., i, :] - pos[..., j, :]
        dist = np.linalg.norm(diff, axis=-1)
        check_collision(float(np.min(dist)), sys.eps_coll, f"bodies {i} and {j}")
        yield i, j, diff, dist


def nbody_potential(x: np.ndarray, sys: BodySystem):
    pos = _bodies(x, sys)
    m = sys.masses
    value = 0.5 * sys.omega * np.sum(m * np.sum(pos[..., :2] ** 2, axis=-1), axis=-1)
    for i, j, _, dist in _pair_geometry(pos, sys):
        value = value + m[i] * m[j] / dist
    return value


def nbody_acceleration_terms(x: np.ndarray, sys: BodySystem) -> np.ndarray:
    """grad U divided body by body by the mass, well defined for a massless centre."""
    pos = _bodies(x, sys)
    m = sys.masses
    acc = sys.omega * pos @ _PLANAR
    for i, j, diff, dist in _pair_geometry(pos, sys):
        pull = diff / dist[..., None] ** 3
        acc[..., i, :] -= m[j] * pull
        acc[..., j, :] += m[i] * pull
    return acc.reshape(np.shape(x))


def nbody_grad(x: np.ndarray, sys: BodySystem) -> np.ndarray:
    acc = nbody_acceleration_terms(x, sys)
    return acc * np.repeat(sys.masses, 3)


def nbody_hess(x: np.ndarray, sys: BodySystem) -> np.ndarray:
    """
    Analytic Hessian of U for one configuration or a batch.

    Each pair tensor scales the outer product diff diff^T as a whole, which
    keeps the result symmetric bit for bit.
    """
    pos = _bodies(x, sys)
    m = sys.masses
    batch = pos.shape[:-2]
    hess = np.zeros(batch + (sys.bodies, 3, sys.bodies, 3))
    for b in range(sys.bodies):
        hess[..., b, :, b, :] = sys.omega * m[b] * _PLANAR
    eye = np.eye(3)
    for i, j, diff, dist in _pair_geometry(pos, sys):
        outer = diff[..., :, None] * diff[..., None, :]
        tensor = m[i] * m[j] * (
            outer * (3.0 / dist[..., None, None] ** 5) - eye / dist[..., None, None] ** 3
        )
        hess[..., i, :, i, :] += tensor
        hess[..., j, :, j, :] += tensor
        hess[..., i, :, j, :] -= tensor
        hess[..., j, :, i, :] -= tensor
    return hess.reshape(batch + (sys.dim, sys.dim))


def nbody_field(s: State, sys: BodySystem, nu: float):
    """
    First-order form of nu^2 M x'' + 2 nu sqrt(omega) M diag(J, 0) x' = grad U.

    Returns:
        Tuple (velocity, acceleration)
    """
    coriolis = 2.0 * nu * np.sqrt(sys.omega) * frame_generator(sys.bodies) @ s.velocity
    accel = (nbody_acceleration_terms(s.position, sys) - coriolis) / nu ** 2
    return s.velocity.copy(), accel
