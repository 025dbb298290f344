"""Grid search, deduplication and Morse classification of satellite equilibria over the ring."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from dynamics import (
    PreconditionError,
    SatelliteSystem,
    SearchError,
    planar_rotation,
    satellite_grad,
    satellite_hess,
)
from .ring import RingConfiguration

logger = logging.getLogger(__name__)

ANGLE_TOL = 1e-8
DEGENERATE_TOL = 1e-8
LABELS = ('r1', 'r2', 'r3', 'extra', 'other')


@dataclass(frozen=True)
class SearchGrid:
    """Polar seed grid and Newton settings."""

    angles: int = 360
    radii: int = 60
    radius_min: float = 0.1
    radius_max: float = 3.0
    dedup_tol: float = 1e-6
    grad_tol: float = 1e-10
    max_iter: int = 80
    max_step: float = 0.1


@dataclass(frozen=True)
class EquilibriumPoint:
    """A planar critical point of the satellite potential with its Hessian data."""

    coords: np.ndarray
    T: float
    D: float
    morse_index: int
    label: str
    orbit_id: int = 0
    ray: str = 'none'
    grad_norm: float = 0.0
    hessian: np.ndarray = field(default=None, repr=False)

    @property
    def radius(self) -> float:
        return float(np.hypot(*self.coords))

    @property
    def angle(self) -> float:
        return float(np.arctan2(self.coords[1], self.coords[0]))

    @property
    def degenerate(self) -> bool:
        return abs(self.D) <= DEGENERATE_TOL

    @property
    def position(self) -> np.ndarray:
        return np.array([self.coords[0], self.coords[1], 0.0])


def _ray_of(p: np.ndarray, n: int) -> str:
    if np.hypot(*p) < 1e-9:
        return 'none'
    zeta = 2.0 * np.pi / n
    phase = np.mod(np.arctan2(p[1], p[0]), zeta)
    if min(phase, zeta - phase) < ANGLE_TOL:
        return 'body'
    if abs(phase - zeta / 2.0) < ANGLE_TOL:
        return 'bisector'
    return 'none'


def _index_from(T: float, D: float, planar: np.ndarray) -> int:
    if D < 0:
        return 1
    if abs(D) <= DEGENERATE_TOL:
        return int(np.sum(np.linalg.eigvalsh(planar) < 0))
    return 0 if T > 0 else 2


def classify_equilibrium(
    p: np.ndarray,
    cfg: RingConfiguration,
    sys: Optional[SatelliteSystem] = None,
    grad_tol: float = 1e-8,
) -> EquilibriumPoint:
    """
    Fill in trace, determinant, Morse index and ray label of a critical point.

    Body rays beyond the ring give r1, inside the ring r2; bisecting rays give
    r3; points off every ray are extra inside the ring and other outside it.
    Degenerate points and the origin are always other.

    Raises:
        PreconditionError: If the gradient at p is not small
    """
    sys = sys or cfg.satellite_system()
    p = np.asarray(p, dtype=float)[:2]
    point = np.array([p[0], p[1], 0.0])
    grad = satellite_grad(point, sys)
    grad_norm = float(np.linalg.norm(grad))
    if grad_norm > grad_tol:
        raise PreconditionError(f"Point {p} is not an equilibrium: |grad V| = {grad_norm:.3e}")
    hess = satellite_hess(point, sys)
    planar = hess[:2, :2]
    T = float(np.trace(planar))
    D = float(planar[0, 0] * planar[1, 1] - planar[0, 1] * planar[1, 0])
    ray = _ray_of(p, cfg.n)
    radius = float(np.hypot(*p))
    if abs(D) <= DEGENERATE_TOL or radius < 1e-9:
        label = 'other'
    elif ray == 'body':
        label = 'r1' if radius > 1.0 else 'r2'
    elif ray == 'bisector':
        label = 'r3'
    else:
        label = 'extra' if radius < 1.0 else 'other'
    return EquilibriumPoint(
        coords=p.copy(),
        T=T,
        D=D,
        morse_index=_index_from(T, D, planar),
        label=label,
        ray=ray,
        grad_norm=grad_norm,
        hessian=hess,
    )


def _newton_batch(seeds: np.ndarray, sys: SatelliteSystem, grid: SearchGrid) -> np.ndarray:
    """Damped planar Newton on all seeds at once; returns converged points."""
    pts = seeds.copy()
    alive = np.ones(len(pts), dtype=bool)
    done = np.zeros(len(pts), dtype=bool)
    near = 1e3 * sys.eps_coll
    for _ in range(grid.max_iter):
        dist = np.linalg.norm(pts[:, None, :] - sys.anchors[None, :, :], axis=-1).min(axis=1)
        alive &= (dist > near) & (np.linalg.norm(pts, axis=1) < 10.0 * grid.radius_max)
        work = alive & ~done
        if not work.any():
            break
        p3 = np.column_stack([pts[work], np.zeros(work.sum())])
        g = satellite_grad(p3, sys)[:, :2]
        h = satellite_hess(p3, sys)[:, :2, :2]
        det = h[:, 0, 0] * h[:, 1, 1] - h[:, 0, 1] * h[:, 1, 0]
        safe = np.abs(det) > 1e-14
        step = -g.copy()
        inv_g0 = (h[:, 1, 1] * g[:, 0] - h[:, 0, 1] * g[:, 1])
        inv_g1 = (-h[:, 1, 0] * g[:, 0] + h[:, 0, 0] * g[:, 1])
        step[safe, 0] = -inv_g0[safe] / det[safe]
        step[safe, 1] = -inv_g1[safe] / det[safe]
        length = np.linalg.norm(step, axis=1)
        scale = np.minimum(1.0, grid.max_step / np.maximum(length, 1e-300))
        pts[work] += step * scale[:, None]
        converged = np.zeros(len(pts), dtype=bool)
        converged[work] = np.linalg.norm(g, axis=1) < grid.grad_tol
        done |= converged
    skipped = int(len(pts) - done.sum())
    if skipped:
        logger.debug(f"{skipped} of {len(pts)} seeds did not converge and were skipped")
    return pts[done & alive]


def polish(p: np.ndarray, sys: SatelliteSystem, steps: int = 6) -> np.ndarray:
    """Plain Newton iterations on a single planar point."""
    p = np.asarray(p, dtype=float)[:2].copy()
    for _ in range(steps):
        point = np.array([p[0], p[1], 0.0])
        g = satellite_grad(point, sys)[:2]
        if np.linalg.norm(g) < 1e-15:
            break
        h = satellite_hess(point, sys)[:2, :2]
        try:
            p -= np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            break
    return p


def _canonical(p: np.ndarray, n: int) -> np.ndarray:
    """Rotate a point by a multiple of zeta into the sector [-tol, zeta - tol)."""
    if np.hypot(*p) < 1e-9:
        return np.zeros(2)
    zeta = 2.0 * np.pi / n
    turns = np.floor((np.arctan2(p[1], p[0]) + 1e-7) / zeta)
    return planar_rotation(-turns * zeta) @ p


def _orbit(p: np.ndarray, n: int, tol: float) -> List[np.ndarray]:
    zeta = 2.0 * np.pi / n
    members: List[np.ndarray] = []
    for j in range(n):
        q = planar_rotation(j * zeta) @ p
        if all(np.linalg.norm(q - m) > tol for m in members):
            members.append(q)
    return members


def _refine_labels(points: List[EquilibriumPoint]) -> List[EquilibriumPoint]:
    """Keep r1/r2/r3 for the outermost orbit on each ray class; inner duplicates become extra."""
    out = list(points)
    for label in ('r1', 'r2', 'r3'):
        orbit_radii: Dict[int, float] = {}
        for eq in out:
            if eq.label == label:
                orbit_radii[eq.orbit_id] = eq.radius
        if len(orbit_radii) < 2:
            continue
        keep = max(orbit_radii, key=orbit_radii.get)
        out = [
            EquilibriumPoint(**{**eq.__dict__, 'label': 'extra'})
            if eq.label == label and eq.orbit_id != keep else eq
            for eq in out
        ]
    return out


def find_satellite_equilibria(
    cfg: RingConfiguration,
    grid: Optional[SearchGrid] = None,
    sys: Optional[SatelliteSystem] = None,
) -> List[EquilibriumPoint]:
    """
    Locate every planar equilibrium reachable from the seed grid.

    Seeds converge by damped Newton, are reduced to one representative per
    Z_n orbit, then expanded back to full orbits and polished. Each member is
    returned with the id of its orbit.

    Raises:
        SearchError: If no seed converges
    """
    grid = grid or SearchGrid()
    sys = sys or cfg.satellite_system()
    radii = np.linspace(grid.radius_min, grid.radius_max, grid.radii)
    angles = 2.0 * np.pi * (np.arange(grid.angles) + 0.5) / grid.angles
    rr, aa = np.meshgrid(radii, angles, indexing='ij')
    seeds = np.column_stack([(rr * np.cos(aa)).ravel(), (rr * np.sin(aa)).ravel()])

    converged = _newton_batch(seeds, sys, grid)
    logger.info(f"Equilibrium search n={cfg.n}, mu={cfg.mu}: {len(converged)} of {len(seeds)} seeds converged")
    if len(converged) == 0:
        raise SearchError(f"No equilibrium found for n={cfg.n}, mu={cfg.mu}")

    reps: List[np.ndarray] = []
    for p in converged:
        c = _canonical(p, cfg.n)
        if all(np.linalg.norm(c - r) > grid.dedup_tol for r in reps):
            reps.append(polish(c, sys))
    reps.sort(key=lambda r: (round(float(np.hypot(*r)), 9), round(float(np.arctan2(r[1], r[0])), 9)))

    points: List[EquilibriumPoint] = []
    for orbit_id, rep in enumerate(reps):
        for member in _orbit(rep, cfg.n, grid.dedup_tol):
            q = polish(member, sys, steps=3)
            eq = classify_equilibrium(q, cfg, sys, grad_tol=1e3 * grid.grad_tol)
            points.append(EquilibriumPoint(**{**eq.__dict__, 'orbit_id': orbit_id}))
    points = _refine_labels(points)
    logger.info(f"Found {len(points)} equilibria in {len(reps)} orbits")
    return points


def morse_census(points: List[EquilibriumPoint], punctures: int) -> Dict[str, int]:
    """
    Count minima, saddles and maxima and compare with the Euler characteristic.

    For the plane with `punctures` primaries removed, a Morse potential satisfies
    #min - #saddle + #max = 1 - punctures.
    """
    regular = [eq for eq in points if not eq.degenerate]
    counts = {
        'minima': sum(eq.morse_index == 0 for eq in regular),
        'saddles': sum(eq.morse_index == 1 for eq in regular),
        'maxima': sum(eq.morse_index == 2 for eq in regular),
        'degenerate': len(points) - len(regular),
    }
    counts['euler'] = counts['minima'] - counts['saddles'] + counts['maxima']
    counts['expected_euler'] = 1 - punctures
    return counts
