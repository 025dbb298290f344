"""
Independent checks of the numerical pipeline.

Every check is computed from the dynamics evaluators directly and compared
with the result of the code under test; the outcome is a table, never an
exception.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Union

import numpy as np
import polars as pl

from continuation import GalerkinModel, loop_inner, real_derivative, real_residual
from dynamics import (
    BodySystem,
    ClassificationError,
    CollisionError,
    SatelliteSystem,
    nbody_grad,
    nbody_hess,
    nbody_potential,
    rotation_generator,
    satellite_grad,
    satellite_hess,
    satellite_potential,
)
from equilibria import EquilibriumPoint, RingConfiguration, SearchGrid, find_satellite_equilibria, morse_census, ring_residual
from spectral import planar_criterion, ring_blocks, satellite_blocks, scan_bifurcations
from symmetry import equivariance_defect

logger = logging.getLogger(__name__)

System = Union[SatelliteSystem, BodySystem]

FD_STEP = 1e-5
FD_TOL = 1e-6
SPECTRUM_TOL = 1e-9
COMMUTATOR_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-10
RANDOM_LOOPS = 20

ORACLE_SCHEMA = {
    'check': pl.Utf8,
    'measured': pl.Float64,
    'threshold': pl.Float64,
    'passed': pl.Boolean,
    'detail': pl.Utf8,
}


@dataclass(frozen=True)
class OracleCheck:
    check: str
    measured: float
    threshold: float
    detail: str = ''

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.measured) and self.measured <= self.threshold)

    def as_row(self) -> Dict:
        return {
            'check': self.check,
            'measured': float(self.measured),
            'threshold': float(self.threshold),
            'passed': self.passed,
            'detail': self.detail,
        }


def _evaluators(system: System):
    if isinstance(system, BodySystem):
        return nbody_potential, nbody_grad, nbody_hess
    return satellite_potential, satellite_grad, satellite_hess


def gradient_check(system: System, x: np.ndarray, h: float = FD_STEP) -> OracleCheck:
    """Central differences of the potential against the analytic gradient, relative to max(1, |grad|)."""
    V, grad, _ = _evaluators(system)
    g = grad(x, system)
    eye = np.eye(len(x))
    fd = np.array([(V(x + h * e, system) - V(x - h * e, system)) / (2.0 * h) for e in eye])
    err = float(np.max(np.abs(fd - g)) / max(1.0, float(np.max(np.abs(g)))))
    return OracleCheck('gradient_fd', err, FD_TOL, f"dim={len(x)}")


def hessian_check(system: System, x: np.ndarray, h: float = FD_STEP) -> OracleCheck:
    """Central differences of the gradient against the analytic Hessian."""
    _, grad, hess = _evaluators(system)
    H = hess(x, system)
    eye = np.eye(len(x))
    fd = np.column_stack([(grad(x + h * e, system) - grad(x - h * e, system)) / (2.0 * h) for e in eye])
    err = float(np.max(np.abs(fd - H)) / max(1.0, float(np.max(np.abs(H)))))
    return OracleCheck('hessian_fd', err, FD_TOL, f"asymmetry={float(np.max(np.abs(H - H.T))):.1e}")


def dense_mode_matrix(cfg: RingConfiguration, nu: float, hessian: Optional[np.ndarray] = None) -> np.ndarray:
    """nu^2 M - 2 i nu sqrt(omega) K + H assembled from the evaluators, centre dropped when massless."""
    sys = cfg.body_system()
    H = nbody_hess(cfg.configuration, sys) if hessian is None else hessian
    A = nu ** 2 * sys.mass_matrix - 2.0j * nu * np.sqrt(cfg.omega) * sys.coriolis_matrix + H
    return A if cfg.mu > 0 else A[3:, 3:]


def equivariance_check(A: np.ndarray, n: int, include_center: bool = True) -> OracleCheck:
    scale = max(1.0, float(np.max(np.abs(A))))
    defect = equivariance_defect(A, n, include_center)
    return OracleCheck('equivariance_commutator', defect / scale, COMMUTATOR_TOL, f"n={n}")


def block_equivalence_checks(cfg: RingConfiguration, nus: np.ndarray) -> List[OracleCheck]:
    """Eigenvalue multisets and Morse-index sums of dense and block-diagonalized mode matrices."""
    worst = 0.0
    mismatches = 0
    skipped = 0
    for nu in nus:
        dense = np.linalg.eigvalsh(dense_mode_matrix(cfg, nu))
        decomposition = ring_blocks(cfg, nu)
        blockwise = decomposition.eigenvalues()
        worst = max(worst, float(np.max(np.abs(dense - blockwise))))
        if np.min(np.abs(dense)) < 1e-8:
            skipped += 1
            continue
        dense_index = int(np.sum(dense < 0))
        block_index = sum(int(np.sum(np.linalg.eigvalsh(b) < 0)) for b in decomposition.blocks.values() if b.size)
        mismatches += int(dense_index != block_index)
    return [
        OracleCheck('block_spectrum', worst, SPECTRUM_TOL, f"{len(nus)} frequencies"),
        OracleCheck('block_morse_index', float(mismatches), 0.0, f"{skipped} frequencies near a crossing skipped"),
    ]


def random_loops(center: np.ndarray, L: int, count: int, amplitude: float, rng: np.random.Generator) -> List[np.ndarray]:
    """Real coefficient rows of random smooth loops around a point, harmonics decaying geometrically."""
    loops = []
    decay = 0.5 ** np.repeat(np.arange(1, L + 1), 2)
    for _ in range(count):
        C = np.zeros((2 * L + 1, len(center)))
        C[0] = center
        C[1:] = amplitude * decay[:, None] * rng.standard_normal((2 * L, len(center)))
        loops.append(C)
    return loops


def orthogonality_checks(system: System, center: np.ndarray, rng: np.random.Generator, count: int = RANDOM_LOOPS) -> List[OracleCheck]:
    """<f(x), x'> and, for n-body systems, <f(x), A_1 x> on random collision-free loops."""
    model = GalerkinModel(system)
    rotation = rotation_generator(system.bodies) if isinstance(system, BodySystem) else None
    time_worst, rotation_worst, used = 0.0, 0.0, 0
    for C in random_loops(center, 2, count, 0.05, rng):
        nu = float(rng.uniform(0.5, 2.0))
        try:
            R = real_residual(C, nu, model)
        except CollisionError:
            continue
        used += 1
        time_worst = max(time_worst, abs(loop_inner(R, real_derivative(C))))
        if rotation is not None:
            rotation_worst = max(rotation_worst, abs(loop_inner(R, C @ rotation.T)))
    checks = [OracleCheck('orthogonality_time', time_worst, ORTHOGONALITY_TOL, f"{used} loops")]
    if rotation is not None:
        checks.append(OracleCheck('orthogonality_rotation', rotation_worst, ORTHOGONALITY_TOL, f"{used} loops"))
    return checks


def satellite_event_checks(points: List[EquilibriumPoint]) -> List[OracleCheck]:
    """Scanned planar event counts against the closed-form criterion; one spatial event at sum m / r^3."""
    criterion_misses, spatial_misses = 0, 0
    spatial_error = 0.0
    checked = 0
    for eq in points:
        planar, spatial = satellite_blocks(eq)
        try:
            expected = planar_criterion(eq.T, eq.D)
        except ClassificationError:
            continue
        checked += 1
        criterion_misses += int(len(scan_bifurcations(planar)) != expected)
        events = scan_bifurcations(spatial)
        if len(events) != 1:
            spatial_misses += 1
            continue
        spatial_error = max(spatial_error, abs(events[0].nu0 ** 2 + float(eq.hessian[2, 2])))
    return [
        OracleCheck('planar_criterion', float(criterion_misses), 0.0, f"{checked} equilibria"),
        OracleCheck('spatial_event_count', float(spatial_misses), 0.0, f"{checked} equilibria"),
        OracleCheck('spatial_event_frequency', spatial_error, 1e-8, 'nu0^2 against sum m / r^3'),
    ]


def _report(checks: List[OracleCheck]) -> pl.DataFrame:
    df = pl.DataFrame([c.as_row() for c in checks], schema=ORACLE_SCHEMA)
    failed = df.filter(~pl.col('passed')).height
    if failed:
        logger.warning(f"⚠️ {failed} of {df.height} oracle checks failed")
    else:
        logger.info(f"✅ All {df.height} oracle checks passed")
    return df


def oracle_suite(
    cfg: RingConfiguration,
    kind: str = 'nbody',
    seed: int = 0,
    frequencies: int = 25,
    grid: Optional[SearchGrid] = None,
) -> pl.DataFrame:
    """
    Run every oracle for a ring (kind 'nbody') or for the satellite over it (kind 'satellite').

    Returns:
        Table with columns check, measured, threshold, passed, detail
    """
    rng = np.random.default_rng(seed)
    checks: List[OracleCheck] = []
    if kind == 'nbody':
        sys = cfg.body_system()
        x = cfg.configuration + 0.05 * rng.standard_normal(sys.dim)
        checks.append(OracleCheck('ring_residual', ring_residual(cfg), 1e-10, f"n={cfg.n}, mu={cfg.mu}"))
        checks.append(gradient_check(sys, x))
        checks.append(hessian_check(sys, x))
        nus = np.sort(rng.uniform(0.05, 3.0 * np.sqrt(cfg.omega) + 1.0, frequencies))
        checks.append(equivariance_check(dense_mode_matrix(cfg, float(nus[0])), cfg.n, cfg.mu > 0))
        checks.extend(block_equivalence_checks(cfg, nus))
        checks.extend(orthogonality_checks(sys, cfg.configuration, rng))
    elif kind == 'satellite':
        sys = cfg.satellite_system()
        points = find_satellite_equilibria(cfg, grid, sys)
        census = morse_census(points, len(sys.masses))
        checks.append(OracleCheck(
            'morse_census',
            float(abs(census['euler'] - census['expected_euler'])),
            0.0,
            f"{len(points)} equilibria",
        ))
        checks.append(OracleCheck('equilibrium_gradient', max(eq.grad_norm for eq in points), 1e-8))
        start = points[int(rng.integers(len(points)))].position + np.array([0.02, -0.03, 0.05])
        checks.append(gradient_check(sys, start))
        checks.append(hessian_check(sys, start))
        checks.extend(satellite_event_checks(points))
        roomiest = max(points, key=lambda eq: sys.min_distance(eq.position))
        checks.extend(orthogonality_checks(sys, roomiest.position, rng))
    else:
        raise ValueError(f"Unknown oracle kind {kind!r}")
    return _report(checks)
