"""Fixed-step RK4 integration of the rescaled equations and the closure test for computed loops."""

import logging
from dataclasses import dataclass, field
from typing import Callable, Tuple, Union

import numpy as np

from dynamics import (
    BodySystem,
    CollisionError,
    PreconditionError,
    SatelliteSystem,
    State,
    angular_momentum,
    energy,
    linear_momentum,
    nbody_field,
    satellite_field,
)
from symmetry import FourierLoop

logger = logging.getLogger(__name__)

System = Union[SatelliteSystem, BodySystem]

CHECK_DT = 1e-3
CLOSURE_DT = 1e-4


@dataclass(frozen=True)
class IntegrationReport:
    """
    Outcome of one integration.

    Drifts are maxima over the recorded trajectory of |Q(t) - Q(0)|. A run that
    reached the collision set stops early with `collided` set.
    """

    times: np.ndarray = field(repr=False)
    trajectory: np.ndarray = field(repr=False)
    energy_drift: float
    angular_momentum_drift: float
    momentum_drift: float
    collided: bool
    dt: float
    steps: int

    @property
    def final(self) -> State:
        return State.from_vector(self.trajectory[-1])


def _vector_field(system: System, nu: float) -> Callable[[np.ndarray], np.ndarray]:
    def rhs(z: np.ndarray) -> np.ndarray:
        s = State.from_vector(z)
        if isinstance(system, BodySystem):
            vel, acc = nbody_field(s, system, nu)
        else:
            vel, acc = satellite_field(s, nu, system)
        return np.concatenate([vel, acc])

    return rhs


def rk4_step(rhs: Callable[[np.ndarray], np.ndarray], z: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(z)
    k2 = rhs(z + 0.5 * dt * k1)
    k3 = rhs(z + 0.5 * dt * k2)
    k4 = rhs(z + dt * k3)
    return z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(system: System, s0: State, nu: float, T: float, dt: float = CHECK_DT, record_every: int = 1) -> IntegrationReport:
    """
    Integrate the time-rescaled equations from s0 over [0, T].

    The step is shrunk slightly so that a whole number of steps lands on T.

    Args:
        system: Satellite or n-body system
        s0: Initial state in rescaled time
        nu: Frequency of the rescaling
        T: Final time
        dt: Requested step
        record_every: Keep every k-th state in the trajectory (the last state is always kept)

    Raises:
        PreconditionError: If dt or T is not positive
        CollisionError: If s0 itself lies in the collision set
    """
    if dt <= 0 or T <= 0:
        raise PreconditionError(f"Need dt > 0 and T > 0, got dt={dt}, T={T}")
    steps = max(1, int(np.ceil(T / dt - 1e-9)))
    dt = T / steps
    rhs = _vector_field(system, nu)
    nbody = isinstance(system, BodySystem)

    z = s0.as_vector().astype(float)
    E0 = energy(s0, nu, system)
    A0 = angular_momentum(s0, system, nu)
    P0 = linear_momentum(s0, system, 0.0, nu) if nbody else np.zeros(3)
    drift = np.zeros(3)
    times, states = [0.0], [z.copy()]
    collided = False
    taken = 0
    for i in range(1, steps + 1):
        try:
            z = rk4_step(rhs, z, dt)
            s = State.from_vector(z)
            t = i * dt
            drift[0] = max(drift[0], abs(energy(s, nu, system) - E0))
        except CollisionError as e:
            logger.warning(f"⚠️ Integration stopped at t={i * dt:.6f}: {e}")
            collided = True
            break
        drift[1] = max(drift[1], abs(angular_momentum(s, system, nu) - A0))
        if nbody:
            drift[2] = max(drift[2], float(np.linalg.norm(linear_momentum(s, system, t, nu) - P0)))
        taken = i
        if i % record_every == 0 or i == steps:
            times.append(t)
            states.append(z.copy())
    return IntegrationReport(
        times=np.array(times),
        trajectory=np.array(states),
        energy_drift=float(drift[0]),
        angular_momentum_drift=float(drift[1]),
        momentum_drift=float(drift[2]),
        collided=collided,
        dt=dt,
        steps=taken,
    )


def momentum_drift(system: BodySystem, s0: State, nu: float, T: float, dt: float = CHECK_DT) -> float:
    """Largest change of the inertial linear momentum along an n-body integration."""
    if not isinstance(system, BodySystem):
        raise PreconditionError("Linear momentum is defined for n-body systems only")
    return integrate(system, s0, nu, T, dt, record_every=max(1, int(T / dt))).momentum_drift


def loop_initial_state(loop: FourierLoop) -> State:
    """(x(0), x'(0)) in rescaled time."""
    return State(loop.evaluate(0.0)[0], loop.derivative().evaluate(0.0)[0])


def _frame_angle(start: np.ndarray, end: np.ndarray) -> float:
    """Planar rotation angle best aligning `end` with `start` (least squares over all triples)."""
    a = start.reshape(-1, 3)[:, :2]
    b = end.reshape(-1, 3)[:, :2]
    cross = np.sum(b[:, 0] * a[:, 1] - b[:, 1] * a[:, 0])
    dot = np.sum(a * b)
    return float(np.arctan2(cross, dot))


def _rotate(vector: np.ndarray, theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    out = vector.reshape(-1, 3).copy()
    u = out[:, :2].copy()
    out[:, 0] = c * u[:, 0] - s * u[:, 1]
    out[:, 1] = s * u[:, 0] + c * u[:, 1]
    return out.reshape(-1)


def closure_error(loop: FourierLoop, system: System, dt: float = CLOSURE_DT) -> float:
    """
    Phase-space distance between the start of a loop and the state reached after time 2 pi.

    For n-body loops the frame rotation is quotiented out first. A collision
    during the integration yields inf.
    """
    s0 = loop_initial_state(loop)
    report = integrate(system, s0, loop.nu, 2.0 * np.pi, dt, record_every=10 ** 9)
    if report.collided:
        logger.warning("⚠️ Closure check collided; reporting inf")
        return float('inf')
    end = report.final
    position, velocity = end.position, end.velocity
    if isinstance(system, BodySystem):
        theta = _frame_angle(
            np.concatenate([s0.position, s0.velocity]),
            np.concatenate([position, velocity]),
        )
        position, velocity = _rotate(position, theta), _rotate(velocity, theta)
    return float(np.linalg.norm(np.concatenate([position - s0.position, velocity - s0.velocity])))


def symmetry_after_integration(
    system: System,
    s0: State,
    nu: float,
    T: float,
    spatial: np.ndarray,
    dt: float = CHECK_DT,
) -> Tuple[float, State]:
    """
    Integrate for time T and compare rho applied to the end state with the start.

    Returns:
        Tuple (|rho(s(T)) - s(0)|, end state)
    """
    report = integrate(system, s0, nu, T, dt, record_every=10 ** 9)
    end = report.final
    moved = np.concatenate([spatial @ end.position, spatial @ end.velocity])
    return float(np.linalg.norm(moved - s0.as_vector())), end
