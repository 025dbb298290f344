"""Branches of periodic loops grown from bifurcation events by pseudo-arclength continuation."""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from tenacity import Retrying, before_sleep_log, retry_if_exception_type, stop_after_attempt

from dynamics import BodySystem, CollisionError, PreconditionError, SatelliteSystem
from equilibria import EquilibriumPoint, RingConfiguration
from spectral import BifurcationEvent, SpectralBlock, blocks_by_key, ring_spectral_blocks, satellite_blocks
from spectral.morse import complement_basis, compress
from symmetry import FourierLoop, IsotropyLabel, symmetry_residual
from .galerkin import System, loop_to_coefficients, trig_basis
from .problem import Correction, CorrectorDivergence, PeriodicProblem, correct

logger = logging.getLogger(__name__)

TERMINATIONS = (
    'max_steps',
    'norm_blowup',
    'period_blowup',
    'collision_approach',
    'equilibrium_return',
    'corrector_failure',
)

SATELLITE_TRUNCATION = 16
NBODY_TRUNCATION = 12


@dataclass(frozen=True)
class ContinuationSettings:
    """Truncation, corrector and step-control parameters of a branch run."""

    L: Optional[int] = None
    epsilon: float = 1e-3
    tol: float = 1e-10
    max_iter: int = 25
    attempts: int = 5
    h_init: float = 1e-2
    h_min: float = 1e-5
    h_max: float = 0.1
    fast_iterations: int = 3
    norm_max: float = 1e3
    period_max: float = 1e3
    collision_factor: float = 10.0
    return_tol: float = 1e-3
    repin_ratio: float = 0.1

    def truncation(self, system: System) -> int:
        if self.L is not None:
            return self.L
        return NBODY_TRUNCATION if isinstance(system, BodySystem) else SATELLITE_TRUNCATION


@dataclass(frozen=True)
class BranchOrigin:
    """The equilibrium a branch leaves from, its blocks and the other equilibria of the system."""

    system: System
    equilibrium: np.ndarray
    blocks: Dict[Hashable, SpectralBlock]
    known_equilibria: List[np.ndarray] = field(default_factory=list)


def origin_for_satellite(
    eq: EquilibriumPoint,
    sys: SatelliteSystem,
    others: Sequence[EquilibriumPoint] = (),
) -> BranchOrigin:
    known = [p.position for p in others if np.linalg.norm(p.coords - eq.coords) > 1e-9]
    return BranchOrigin(
        system=sys,
        equilibrium=eq.position,
        blocks=blocks_by_key(satellite_blocks(eq)),
        known_equilibria=known,
    )


def origin_for_ring(cfg: RingConfiguration) -> BranchOrigin:
    if cfg.mu <= 0:
        raise PreconditionError("Ring continuation needs a positive central mass")
    return BranchOrigin(
        system=cfg.body_system(),
        equilibrium=cfg.configuration,
        blocks=blocks_by_key(ring_spectral_blocks(cfg)),
    )


@dataclass(frozen=True)
class BranchPoint:
    """A converged loop on a branch."""

    loop: FourierLoop
    nu: float
    multipliers: np.ndarray
    arclength: float
    residual: float
    iterations: int
    symmetry_residual: float

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.nu

    @property
    def amplitude(self) -> float:
        """L2 norm of the non-constant part of the loop."""
        harmonics = self.loop.coefficients.copy()
        harmonics[self.loop.L] = 0.0
        return float(np.sqrt(np.sum(np.abs(harmonics) ** 2)))

    @property
    def mean(self) -> np.ndarray:
        return self.loop.mode(0).real


@dataclass
class Branch:
    """Ordered continuation points grown from one bifurcation event."""

    event: BifurcationEvent
    origin: BranchOrigin
    problem: PeriodicProblem
    settings: ContinuationSettings
    points: List[BranchPoint] = field(default_factory=list)
    termination: Optional[str] = None
    step: float = 0.0
    tangent: Optional[np.ndarray] = field(default=None, repr=False)
    epsilon: float = 0.0
    states: List[Tuple[np.ndarray, float, np.ndarray]] = field(default_factory=list, repr=False)

    @property
    def label(self) -> IsotropyLabel:
        return self.problem.label

    def __len__(self) -> int:
        return len(self.points)

    def max_multiplier(self) -> float:
        return max((float(np.max(np.abs(p.multipliers))) for p in self.points), default=0.0)


def kernel_direction(event: BifurcationEvent, origin: BranchOrigin) -> np.ndarray:
    """
    Unit kernel vector of the event's block at nu0, in full complex coordinates.

    Deflated directions are removed first, so structural modes never serve as
    the predictor.
    """
    if event.block not in origin.blocks:
        raise PreconditionError(f"Event block {event.block!r} does not belong to this origin")
    block = origin.blocks[event.block]
    Q = complement_basis(block.size, block.deflation)
    reduced = compress(block.matrix(event.nu0), Q)
    values, vectors = np.linalg.eigh(reduced)
    pick = int(np.argmin(np.abs(values)))
    logger.debug(f"Kernel of {block.name} at nu0={event.nu0:.12f}: eigenvalue {values[pick]:.3e}")
    xi = vectors[:, pick] if Q is None else Q @ vectors[:, pick]
    w = xi if block.basis is None else block.basis @ xi
    return w / np.linalg.norm(w)


def _predictor(problem: PeriodicProblem, w: np.ndarray) -> np.ndarray:
    """Mode-one real rows of Re(w exp(it)), phase-aligned and projected onto the fixed subspace."""
    c = int(np.argmax(np.abs(w)))
    w = w * np.exp(-1j * np.angle(w[c]))
    C = np.zeros((2 * problem.L + 1, problem.dim))
    C[1] = w.real
    C[2] = -w.imag
    y = problem.coordinates(C)
    if np.linalg.norm(y) < 0.5:
        raise PreconditionError(
            f"Kernel direction lies outside the {problem.label.name} subspace (projected norm {np.linalg.norm(y):.3e})"
        )
    return y / np.linalg.norm(y)


def _make_point(problem: PeriodicProblem, corr: Correction, arclength: float) -> BranchPoint:
    loop = problem.loop(corr.y, corr.nu)
    return BranchPoint(
        loop=loop,
        nu=corr.nu,
        multipliers=corr.multipliers,
        arclength=arclength,
        residual=corr.residual,
        iterations=corr.iterations,
        symmetry_residual=symmetry_residual(loop, problem.label),
    )


def branch_from_event(
    event: BifurcationEvent,
    origin: BranchOrigin,
    epsilon: Optional[float] = None,
    settings: Optional[ContinuationSettings] = None,
) -> Branch:
    """
    Start a branch at an event: predictor along the kernel vector, then a Newton correction.

    The first point solves the augmented system closed by <v, y - y_eq> = epsilon,
    v the predictor. A diverging corrector is retried with half the amplitude.

    Args:
        event: Event with a nonzero index jump
        origin: Equilibrium data the event was scanned from
        epsilon: Initial amplitude in [1e-4, 1e-2]

    Returns:
        Branch holding the first corrected point

    Raises:
        PreconditionError: For a zero jump, an amplitude out of range or a
            kernel vector outside the fixed subspace
        CorrectorDivergence: When every attempt diverges
    """
    settings = settings or ContinuationSettings()
    epsilon = settings.epsilon if epsilon is None else epsilon
    if event.eta == 0:
        raise PreconditionError(f"Event at nu0={event.nu0} has no index jump")
    if not 1e-4 <= epsilon <= 1e-2:
        raise PreconditionError(f"Initial amplitude {epsilon} outside [1e-4, 1e-2]")
    if event.label is None:
        raise PreconditionError(f"Event at nu0={event.nu0} carries no isotropy label")
    if event.resonant:
        logger.warning(f"⚠️ Event {event.label.name} at nu0={event.nu0:.10f} is resonant; continuing anyway")

    L = settings.truncation(origin.system)
    problem = PeriodicProblem(origin.system, event.label, L, origin.equilibrium)
    w = kernel_direction(event, origin)
    v = _predictor(problem, w)
    problem.pin = problem.choose_pin(problem.coefficients(v))
    zeros = np.zeros(problem.multipliers)
    closing_row = np.append(v, 0.0)

    amplitude = epsilon
    for attempt in Retrying(
        stop=stop_after_attempt(settings.attempts),
        retry=retry_if_exception_type(CorrectorDivergence),
        before_sleep=before_sleep_log(logger, logging.WARNING),
        reraise=True,
    ):
        with attempt:
            amplitude = epsilon / 2 ** (attempt.retry_state.attempt_number - 1)
            corr = correct(
                problem,
                problem.y_eq + amplitude * v,
                event.nu0,
                zeros,
                closing_row,
                float(v @ problem.y_eq) + amplitude,
                tol=settings.tol,
                max_iter=settings.max_iter,
            )

    start = np.append(problem.y_eq, event.nu0)
    first = np.append(corr.y, corr.nu)
    secant = first - start
    span = float(np.linalg.norm(secant))
    branch = Branch(
        event=event,
        origin=origin,
        problem=problem,
        settings=settings,
        step=settings.h_init,
        tangent=secant / span,
        epsilon=amplitude,
    )
    branch.points.append(_make_point(problem, corr, span))
    branch.states.append((corr.y, corr.nu, corr.multipliers))
    logger.info(
        f"Branch {problem.label.name} started at nu0={event.nu0:.10f}: "
        f"eps={amplitude:.1e}, nu={corr.nu:.10f}, {corr.iterations} Newton iterations"
    )
    return branch


def _termination(branch: Branch, point: BranchPoint) -> Optional[str]:
    settings = branch.settings
    if point.loop.norm() > settings.norm_max:
        return 'norm_blowup'
    if point.nu <= 0 or point.period > settings.period_max:
        return 'period_blowup'
    samples = point.loop.evaluate(2.0 * np.pi * np.arange(256) / 256)
    if branch.problem.model.min_distance(samples) < settings.collision_factor * branch.origin.system.eps_coll:
        return 'collision_approach'
    if point.amplitude < settings.return_tol:
        for other in branch.origin.known_equilibria:
            if np.linalg.norm(point.mean - other) < settings.return_tol:
                return 'equilibrium_return'
    return None


def _maybe_repin(branch: Branch, y: np.ndarray, y_prev: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Move the phase anchor when its harmonic has faded; both points are shifted alike."""
    problem = branch.problem
    C = problem.coefficients(y)
    l, c = problem.pin
    amplitudes = np.hypot(C[1::2], C[2::2])
    if np.hypot(C[2 * l - 1, c], C[2 * l, c]) >= branch.settings.repin_ratio * amplitudes.max():
        return y, y_prev
    pin = problem.choose_pin(C)
    _, phi = problem.align_phase(C, pin)
    problem.pin = pin
    logger.info(f"Phase anchor moved to mode {pin[0]}, component {pin[1]}")
    return problem.shift(y, phi), problem.shift(y_prev, phi)


def continue_branch(branch: Branch, max_steps: int = 20) -> Branch:
    """
    Pseudo-arclength continuation with a secant predictor.

    Each step solves the augmented system closed by <tau, X - X_k> = h with
    X = (y, nu). The step halves on a failed correction and doubles after a fast
    one, within [h_min, h_max]. Every way a branch ends is recorded in
    `branch.termination`; none is raised.
    """
    if not branch.points:
        raise PreconditionError("Branch has no initial point")
    settings = branch.settings
    problem = branch.problem
    y_k, nu_k, lam_k = branch.states[-1]
    tau = branch.tangent
    h = branch.step
    steps = 0
    branch.termination = None
    while steps < max_steps:
        X_k = np.append(y_k, nu_k)
        guess = X_k + h * tau
        try:
            corr = correct(
                problem,
                guess[:-1],
                float(guess[-1]),
                lam_k,
                tau,
                float(tau @ X_k) + h,
                tol=settings.tol,
                max_iter=settings.max_iter,
            )
        except CorrectorDivergence as e:
            h *= 0.5
            logger.debug(f"Step rejected ({e}); h -> {h:.2e}")
            if h < settings.h_min:
                branch.termination = 'corrector_failure'
                break
            continue
        except CollisionError as e:
            logger.warning(f"⚠️ Collision set reached while correcting: {e}")
            branch.termination = 'collision_approach'
            break

        advance = float(np.linalg.norm(np.append(corr.y, corr.nu) - X_k))
        y_new, y_k = _maybe_repin(branch, corr.y, y_k)
        corr = replace(corr, y=y_new)
        tau = np.append(y_new - y_k, corr.nu - nu_k)
        tau /= np.linalg.norm(tau)

        point = _make_point(problem, corr, branch.points[-1].arclength + advance)
        branch.points.append(point)
        branch.states.append((corr.y, corr.nu, corr.multipliers))
        steps += 1
        y_k, nu_k, lam_k = corr.y, corr.nu, corr.multipliers
        if corr.iterations <= settings.fast_iterations:
            h = min(2.0 * h, settings.h_max)
        reason = _termination(branch, point)
        if reason:
            branch.termination = reason
            break
    else:
        branch.termination = 'max_steps'
    branch.tangent, branch.step = tau, h
    last = branch.points[-1]
    logger.info(
        f"Branch {problem.label.name}: {len(branch.points)} points, s={last.arclength:.4f}, "
        f"nu={last.nu:.8f}, termination={branch.termination}"
    )
    return branch


def refine_truncation(branch: Branch, index: int = -1, L: Optional[int] = None) -> Tuple[BranchPoint, float]:
    """
    Re-correct one branch point at a higher truncation order (default 2L).

    The amplitude a_l[c] at the phase anchor is held fixed, which keeps the
    refined point on the same branch.

    Returns:
        Tuple (refined point, L2 norm of the change of the loop)
    """
    coarse = branch.problem
    L = L or 2 * coarse.L
    point = branch.points[index]
    fine = PeriodicProblem(branch.origin.system, coarse.label, L, branch.origin.equilibrium)
    fine.pin = coarse.pin
    C = loop_to_coefficients(point.loop, L)
    y = fine.coordinates(C)
    l, c = fine.pin
    anchor = (2 * l - 1) * fine.dim + c
    closing_row = np.append(fine.basis[anchor], 0.0)
    corr = correct(
        fine,
        y,
        point.nu,
        point.multipliers,
        closing_row,
        float(C[2 * l - 1, c]),
        tol=branch.settings.tol,
        max_iter=branch.settings.max_iter,
    )
    refined = _make_point(fine, corr, point.arclength)
    padded = loop_to_coefficients(point.loop, L)
    change = float(np.sqrt(np.sum((refined.loop.to_real() - padded) ** 2 * trig_basis(L).weights[:, None])))
    logger.info(f"Truncation {coarse.L} -> {L}: loop changed by {change:.3e}")
    return refined, change
