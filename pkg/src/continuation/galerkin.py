"""Fourier-Galerkin residual of the rescaled equations in real trigonometric coefficients."""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np

from dynamics import (
    BodySystem,
    SatelliteSystem,
    frame_generator,
    nbody_grad,
    nbody_hess,
    satellite_grad,
    satellite_hess,
)
from symmetry import FourierLoop

System = Union[SatelliteSystem, BodySystem]


@dataclass(frozen=True)
class TrigBasis:
    """
    Sampling and projection operators for rows [a0, a1, b1, ..., aL, bL].

    Nonlinear terms are sampled on 4(2L+1) equispaced points, which keeps
    products of modes up to order 2L free of aliasing.
    """

    L: int
    times: np.ndarray
    synthesis: np.ndarray
    analysis: np.ndarray
    derivative: np.ndarray
    weights: np.ndarray

    @property
    def rows(self) -> int:
        return 2 * self.L + 1


@lru_cache(maxsize=32)
def trig_basis(L: int) -> TrigBasis:
    rows = 2 * L + 1
    samples = 4 * rows
    t = 2.0 * np.pi * np.arange(samples) / samples
    synthesis = np.ones((samples, rows))
    analysis = np.full((rows, samples), 1.0 / samples)
    derivative = np.zeros((rows, rows))
    weights = np.ones(rows)
    for l in range(1, L + 1):
        synthesis[:, 2 * l - 1] = np.cos(l * t)
        synthesis[:, 2 * l] = np.sin(l * t)
        analysis[2 * l - 1] = 2.0 * np.cos(l * t) / samples
        analysis[2 * l] = 2.0 * np.sin(l * t) / samples
        derivative[2 * l - 1, 2 * l] = l
        derivative[2 * l, 2 * l - 1] = -l
        weights[2 * l - 1] = weights[2 * l] = 0.5
    for arr in (t, synthesis, analysis, derivative, weights):
        arr.setflags(write=False)
    return TrigBasis(L, t, synthesis, analysis, derivative, weights)


class GalerkinModel:
    """Mass, Coriolis and force evaluations of one system in a common interface."""

    def __init__(self, system: System):
        self.system = system
        if isinstance(system, BodySystem):
            self.mass = system.mass_matrix
            self.coriolis = system.coriolis_matrix
            self.speed = float(np.sqrt(system.omega))
            self._grad, self._hess = nbody_grad, nbody_hess
        else:
            self.mass = np.eye(3)
            self.coriolis = frame_generator(1)
            self.speed = 1.0
            self._grad, self._hess = satellite_grad, satellite_hess
        self.dim = self.mass.shape[0]

    @property
    def is_nbody(self) -> bool:
        return isinstance(self.system, BodySystem)

    def grad(self, x: np.ndarray) -> np.ndarray:
        return self._grad(x, self.system)

    def hess(self, x: np.ndarray) -> np.ndarray:
        return self._hess(x, self.system)

    def min_distance(self, x: np.ndarray) -> float:
        return self.system.min_distance(x)


def real_residual(C: np.ndarray, nu: float, model: GalerkinModel) -> np.ndarray:
    """
    Coefficients of f(x) = grad V(x) - nu^2 M x'' - 2 nu c K x'.

    Mode by mode this is l^2 nu^2 M x_l - 2 i l nu c K x_l + g_l, the sign that
    makes zeros coincide with solutions of the rescaled equations.

    Raises:
        CollisionError: If a sample of the curve enters the collision set
    """
    basis = trig_basis(C.shape[0] // 2)
    D = basis.derivative
    samples = basis.synthesis @ C
    forcing = basis.analysis @ model.grad(samples)
    return forcing - nu ** 2 * (D @ D @ C) @ model.mass.T - 2.0 * nu * model.speed * (D @ C) @ model.coriolis.T


def real_jacobian(C: np.ndarray, nu: float, model: GalerkinModel) -> Tuple[np.ndarray, np.ndarray]:
    """
    Derivatives of `real_residual` with respect to the flattened coefficients and nu.

    Returns:
        Tuple (dR/dC of shape (P*d, P*d), dR/dnu of shape (P*d,)) with P = 2L+1
    """
    basis = trig_basis(C.shape[0] // 2)
    D = basis.derivative
    P, d = C.shape
    hessians = model.hess(basis.synthesis @ C)
    nonlinear = np.einsum('pm,mij,mq->piqj', basis.analysis, hessians, basis.synthesis).reshape(P * d, P * d)
    linear = -nu ** 2 * np.kron(D @ D, model.mass) - 2.0 * nu * model.speed * np.kron(D, model.coriolis)
    d_nu = -2.0 * nu * (D @ D @ C) @ model.mass.T - 2.0 * model.speed * (D @ C) @ model.coriolis.T
    return nonlinear + linear, d_nu.reshape(-1)


def fourier_residual(loop: FourierLoop, nu: float, system: System) -> FourierLoop:
    """Residual of the rescaled equations for a loop, returned in complex Fourier form."""
    model = GalerkinModel(system)
    return loop_from_coefficients(real_residual(loop_to_coefficients(loop), nu, model), nu)


def loop_inner(A: np.ndarray, B: np.ndarray) -> float:
    """(1/2pi) int <a(t), b(t)> dt for two real coefficient arrays."""
    weights = trig_basis(A.shape[0] // 2).weights
    return float(np.sum(weights[:, None] * A * B))


def real_derivative(C: np.ndarray) -> np.ndarray:
    return trig_basis(C.shape[0] // 2).derivative @ C


def loop_to_coefficients(loop: FourierLoop, L: Optional[int] = None) -> np.ndarray:
    """Real rows of a loop, truncated or zero-padded to order L."""
    C = loop.to_real()
    if L is None or L == loop.L:
        return C
    out = np.zeros((2 * L + 1, loop.dim))
    keep = min(L, loop.L)
    out[:2 * keep + 1] = C[:2 * keep + 1]
    return out


def loop_from_coefficients(C: np.ndarray, nu: float) -> FourierLoop:
    """Complex loop from real rows [a0, a1, b1, ..., aL, bL], the inverse of `loop_to_coefficients`."""
    return FourierLoop.from_real(np.asarray(C, dtype=float), nu)
