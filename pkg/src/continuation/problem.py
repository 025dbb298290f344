"""
Periodic problems restricted to a fixed subspace, augmented by the generators
of time shift (and frame rotation for the ring) and pinned against them.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from dynamics import BodySystem, DomainError, PreconditionError, rotation_generator
from symmetry import FourierLoop, IsotropyLabel, fixed_subspace_basis, phase_rows
from .galerkin import (
    GalerkinModel,
    System,
    loop_from_coefficients,
    loop_to_coefficients,
    real_jacobian,
    real_residual,
    trig_basis,
)

logger = logging.getLogger(__name__)

# Largest harmonic amplitude below which a loop counts as fixed by time shifts.
GROUP_FIXED_TOL = 1e-12
# Rows of the fixed-subspace basis shorter than this are treated as structurally zero.
ROW_TOL = 1e-8


class PinningError(DomainError):
    """No usable phase anchor: the loop is (nearly) fixed by every time shift."""


class CorrectorDivergence(DomainError):
    """Newton's method on the augmented system did not reach the tolerance."""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class AugmentedSystem:
    """
    Augmented residual and its Jacobian at one point.

    Columns of `jacobian` are ordered (y, nu, lambda_0[, lambda_1]); rows are the
    restricted residual followed by the phase pin and, for the ring, the rotation pin.
    The system becomes square once a closing equation is appended.
    """

    residual: np.ndarray
    jacobian: np.ndarray


class PeriodicProblem:
    """
    Galerkin truncation of the rescaled equations on the loops fixed by an isotropy label.

    Coordinates y are taken in an orthonormal basis B of the fixed subspace of
    real coefficients, so a loop is vec(C) = B y. The residual restricted to the
    fixed subspace stays in it by equivariance and is represented as B^T vec(R).

    Args:
        system: Satellite or ring n-body system
        label: Isotropy label of the loops to compute
        L: Truncation order
        equilibrium: Flattened equilibrium the branch leaves from
    """

    def __init__(self, system: System, label: IsotropyLabel, L: int, equilibrium: np.ndarray):
        if L < 1:
            raise PreconditionError(f"Truncation order must be at least 1, got {L}")
        self.model = GalerkinModel(system)
        if label.dim != self.model.dim:
            raise PreconditionError(f"{label.name} acts on dimension {label.dim}, system has {self.model.dim}")
        if isinstance(system, BodySystem) and system.masses[0] <= 0:
            raise PreconditionError("Ring continuation needs a positive central mass")
        self.system = system
        self.label = label
        self.L = L
        self.equilibrium = np.asarray(equilibrium, dtype=float).reshape(-1)
        self.basis = fixed_subspace_basis(label, L)
        C_eq = np.zeros((2 * L + 1, self.model.dim))
        C_eq[0] = self.equilibrium
        self.y_eq = self.basis.T @ C_eq.reshape(-1)
        self.rotation = rotation_generator(system.bodies) if self.model.is_nbody else None
        self.rotation_row = self._rotation_row() if self.rotation is not None else None
        self.pin: Optional[Tuple[int, int]] = None

    @property
    def size(self) -> int:
        return self.basis.shape[1]

    @property
    def multipliers(self) -> int:
        return 1 if self.rotation is None else 2

    @property
    def dim(self) -> int:
        return self.model.dim

    def _rotation_row(self) -> np.ndarray:
        # tangent of the rotation orbit through the equilibrium, carried by the mean mode
        g = np.zeros((2 * self.L + 1, self.dim))
        g[0] = self.rotation @ self.equilibrium
        row = self.basis.T @ g.reshape(-1)
        norm = np.linalg.norm(row)
        if norm < ROW_TOL:
            raise PinningError(f"Rotation orbit of the equilibrium leaves the {self.label.name} subspace")
        return row / norm

    def coefficients(self, y: np.ndarray) -> np.ndarray:
        return (self.basis @ y).reshape(2 * self.L + 1, self.dim)

    def coordinates(self, C: np.ndarray) -> np.ndarray:
        return self.basis.T @ np.asarray(C, dtype=float).reshape(-1)

    def loop(self, y: np.ndarray, nu: float) -> FourierLoop:
        return loop_from_coefficients(self.coefficients(y), nu)

    def _pin_index(self, l: int, c: int) -> int:
        return (2 * l) * self.dim + c

    def choose_pin(self, C: np.ndarray, exclude: Sequence[Tuple[int, int]] = ()) -> Tuple[int, int]:
        """
        Pick the anchor (l, c) for the phase condition b_l[c] = 0.

        Anchors are ranked by harmonic amplitude |x_l[c]|; an anchor whose basis
        row vanishes cannot move and is skipped.

        Raises:
            PinningError: If no harmonic of C carries amplitude
        """
        C = np.asarray(C, dtype=float)
        candidates = []
        for l in range(1, self.L + 1):
            amp = np.hypot(C[2 * l - 1], C[2 * l])
            for c in range(self.dim):
                if (l, c) in exclude or amp[c] < GROUP_FIXED_TOL:
                    continue
                if np.linalg.norm(self.basis[self._pin_index(l, c)]) < ROW_TOL:
                    continue
                candidates.append((amp[c], -l, c))
        if not candidates:
            raise PinningError(f"No phase anchor for {self.label.name}: the loop is fixed by time shifts")
        _, neg_l, c = max(candidates)
        return -neg_l, c

    def align_phase(self, C: np.ndarray, pin: Tuple[int, int]) -> Tuple[np.ndarray, float]:
        """Shift time so that b_l[c] = 0 and a_l[c] > 0; returns the shifted rows and the shift."""
        l, c = pin
        a, b = C[2 * l - 1, c], C[2 * l, c]
        phi = float(np.arctan2(b, a)) / l
        return phase_rows(self.L, phi) @ C, phi

    def shift(self, y: np.ndarray, phi: float) -> np.ndarray:
        return self.coordinates(phase_rows(self.L, phi) @ self.coefficients(y))

    def pin_row(self) -> np.ndarray:
        if self.pin is None:
            raise PinningError("Phase anchor not set")
        return self.basis[self._pin_index(*self.pin)]


def augment(
    problem: PeriodicProblem,
    loop: FourierLoop,
    nu: float,
    multipliers: Optional[Sequence[float]] = None,
) -> AugmentedSystem:
    """
    Residual of f(x) + lambda_0 x' (+ lambda_1 A_1 x) restricted to the fixed subspace, plus pins.

    The phase pin fixes b_l[c] = 0 at the problem's anchor, chosen from the loop
    when not yet set. The rotation pin keeps the mean configuration orthogonal to
    the rotation orbit of the equilibrium.

    Raises:
        PinningError: If the loop is fixed by time shifts (an equilibrium)
        CollisionError: If the loop enters the collision set
    """
    C = problem.coefficients(problem.coordinates(loop_to_coefficients(loop, problem.L)))
    if problem.pin is None:
        problem.pin = problem.choose_pin(C)
    elif np.max(np.abs(C[1:])) < GROUP_FIXED_TOL:
        raise PinningError(f"Loop is fixed by time shifts; {problem.label.name} anchor {problem.pin} is degenerate")
    lam = np.zeros(problem.multipliers) if multipliers is None else np.asarray(multipliers, dtype=float)
    return _assemble(problem, C, nu, lam)


def _assemble(problem: PeriodicProblem, C: np.ndarray, nu: float, lam: np.ndarray) -> AugmentedSystem:
    model = problem.model
    B = problem.basis
    D = trig_basis(problem.L).derivative
    P, d = C.shape

    R = real_residual(C, nu, model) + lam[0] * (D @ C)
    J_C, J_nu = real_jacobian(C, nu, model)
    J_C = J_C + lam[0] * np.kron(D, np.eye(d))
    columns = [(D @ C).reshape(-1)]
    if problem.rotation is not None:
        A1 = problem.rotation
        R = R + lam[1] * (C @ A1.T)
        J_C = J_C + lam[1] * np.kron(np.eye(P), A1)
        columns.append((C @ A1.T).reshape(-1))

    y = B.T @ C.reshape(-1)
    pins = [problem.pin_row()]
    if problem.rotation_row is not None:
        pins.append(problem.rotation_row)
    residual = np.concatenate([B.T @ R.reshape(-1), [row @ y for row in pins]])

    top = np.hstack([
        B.T @ J_C @ B,
        (B.T @ J_nu)[:, None],
        np.column_stack([B.T @ col for col in columns]),
    ])
    bottom = np.hstack([np.vstack(pins), np.zeros((len(pins), 1 + problem.multipliers))])
    return AugmentedSystem(residual=residual, jacobian=np.vstack([top, bottom]))


@dataclass(frozen=True)
class Correction:
    """Converged unknowns of one Newton solve."""

    y: np.ndarray
    nu: float
    multipliers: np.ndarray
    residual: float
    iterations: int


def correct(
    problem: PeriodicProblem,
    y: np.ndarray,
    nu: float,
    multipliers: np.ndarray,
    closing_row: np.ndarray,
    closing_value: float,
    tol: float = 1e-10,
    max_iter: int = 25,
    blowup: float = 1e6,
) -> Correction:
    """
    Newton iteration on the augmented system closed by <closing_row, (y, nu)> = closing_value.

    Raises:
        CorrectorDivergence: After max_iter iterations, on a singular system or on
            non-finite or exploding iterates
        CollisionError: If an iterate enters the collision set
    """
    z = np.concatenate([y, [nu], multipliers])
    n_y = problem.size
    closing_jac = np.concatenate([closing_row, np.zeros(problem.multipliers)])

    def evaluate(z: np.ndarray):
        system = _assemble(problem, problem.coefficients(z[:n_y]), z[n_y], z[n_y + 1:])
        F = np.append(system.residual, closing_row @ z[:n_y + 1] - closing_value)
        return F, np.vstack([system.jacobian, closing_jac])

    def newton_step(z: np.ndarray, F: np.ndarray, jacobian: np.ndarray, iteration: int, norm: float) -> np.ndarray:
        try:
            return z - np.linalg.solve(jacobian, F)
        except np.linalg.LinAlgError as e:
            raise CorrectorDivergence(f"Singular augmented Jacobian: {e}", iteration, norm)

    norm = np.inf
    for iteration in range(max_iter + 1):
        F, jacobian = evaluate(z)
        norm = float(np.max(np.abs(F)))
        if not np.isfinite(norm) or norm > blowup:
            raise CorrectorDivergence(f"Corrector blew up at iteration {iteration}: |F| = {norm:.3e}", iteration, norm)
        logger.debug(f"Newton iteration {iteration}: |F| = {norm:.3e}, nu = {z[n_y]:.12f}")
        if norm < tol:
            # one more step drives the multipliers to round-off level
            polished = newton_step(z, F, jacobian, iteration, norm)
            F_polished, _ = evaluate(polished)
            polished_norm = float(np.max(np.abs(F_polished)))
            if np.isfinite(polished_norm) and polished_norm <= norm:
                z, norm = polished, polished_norm
            return Correction(
                y=z[:n_y].copy(),
                nu=float(z[n_y]),
                multipliers=z[n_y + 1:].copy(),
                residual=norm,
                iterations=iteration,
            )
        if iteration == max_iter:
            break
        z = newton_step(z, F, jacobian, iteration, norm)
    raise CorrectorDivergence(f"No convergence in {max_iter} iterations: |F| = {norm:.3e}", max_iter, norm)
