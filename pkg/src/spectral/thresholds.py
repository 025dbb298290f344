"""Central-mass thresholds: mu_k degeneracies, empirical event-pattern changes and ring stability."""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as spl

from dynamics import PreconditionError, frame_generator, nbody_hess
from equilibria import RingConfiguration, maxwell_ring
from symmetry import isotypic_basis
from .survey import ScanSettings, scan_ring

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThresholdRecord:
    """A central mass where the spectral picture changes, with the evidence that brackets it."""

    kind: str
    k: int
    mu: Optional[float]
    bracket: Tuple[float, float]
    value_left: float
    value_right: float
    crossings: int = 0
    block: str = 'planar'

    @property
    def found(self) -> bool:
        return self.mu is not None


def planar_block_determinant(n: int, k: int, mu: float) -> float:
    """
    Determinant of the mass-normalized planar block k of the Hessian at the ring (nu = 0).

    Normalizing by M^(-1/2) keeps the central row finite as mu -> 0 without
    changing the sign of the determinant.
    """
    if not 1 <= k <= n - 1:
        raise PreconditionError(f"k must lie in 1..{n - 1}, got {k}")
    if mu <= 0:
        raise PreconditionError(f"mu must be positive, got {mu}")
    cfg = maxwell_ring(n, mu)
    sys = cfg.body_system()
    hess = nbody_hess(cfg.configuration, sys)
    U = isotypic_basis(n, include_center=True)[(k, 'planar')]
    block = U.conj().T @ hess @ U
    scale = 1.0 / np.sqrt(np.real(np.diag(U.conj().T @ sys.mass_matrix @ U)))
    return float(np.real(np.linalg.det(block * np.outer(scale, scale))))


def find_mu_k(
    n: int,
    k: int,
    mu_range: Tuple[float, float] = (1e-6, 50.0),
    samples: int = 400,
    tol: float = 1e-10,
) -> ThresholdRecord:
    """
    Locate the central mass where planar block k becomes singular at nu = 0.

    The determinant is sampled on a geometric grid and the first sign change is
    refined by bisection. A range without sign change yields a record with
    mu = None rather than an error.
    """
    lo_mu, hi_mu = mu_range
    mus = np.geomspace(lo_mu, hi_mu, samples)
    dets = np.array([planar_block_determinant(n, k, m) for m in mus])
    changes = np.flatnonzero(np.sign(dets[:-1]) * np.sign(dets[1:]) < 0)
    if len(changes) == 0:
        logger.warning(f"No sign change of block {k} determinant for n={n} on mu in {mu_range}")
        return ThresholdRecord('mu_k', k, None, (lo_mu, hi_mu), float(dets[0]), float(dets[-1]), 0)
    i = int(changes[0])
    lo, hi = float(mus[i]), float(mus[i + 1])
    d_lo = float(dets[i])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        d_mid = planar_block_determinant(n, k, mid)
        if np.sign(d_mid) == np.sign(d_lo):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    d_hi = planar_block_determinant(n, k, hi)
    logger.info(f"mu_{k} for n={n}: {0.5 * (lo + hi):.12g} ({len(changes)} sign change(s) on the grid)")
    return ThresholdRecord('mu_k', k, 0.5 * (lo + hi), (lo, hi), d_lo, d_hi, len(changes))


@dataclass(frozen=True)
class StabilityReport:
    """Spectrum of the first-order linearization at the ring."""

    eigenvalues: np.ndarray = field(repr=False)
    structural: np.ndarray = field(repr=False)
    max_real_part: float
    verdict: str
    symmetry_defect: float


def _pairing_defect(values: np.ndarray) -> float:
    """How far the spectrum is from being closed under lambda -> -lambda and lambda -> conj(lambda)."""
    worst = 0.0
    for image in (-values, np.conj(values)):
        gaps = np.abs(image[:, None] - values[None, :]).min(axis=1)
        worst = max(worst, float(gaps.max()))
    return worst


def _companion_eigenvalues(K: np.ndarray, G: np.ndarray, speed: float) -> np.ndarray:
    """Eigenvalues of [[0, I], [K, -2 c G]], the first-order form of y'' + 2 c G y' = K y."""
    d = K.shape[0]
    if d == 0:
        return np.zeros(0, dtype=complex)
    A = np.block([
        [np.zeros((d, d), dtype=complex), np.eye(d, dtype=complex)],
        [K, -2.0 * speed * G],
    ])
    return spl.eigvals(A)


def _translations(masses: np.ndarray) -> List[np.ndarray]:
    """Planar translations in mass-normalized coordinates, sqrt(m) along x and along y."""
    out = []
    for axis in (0, 1):
        v = np.zeros(len(masses))
        v[axis::3] = np.sqrt(masses[axis::3])
        out.append(v / np.linalg.norm(v))
    return out


def linear_stability(cfg: RingConfiguration, stable_tol: float = 1e-8) -> StabilityReport:
    """
    Spectrum of the linearization y'' + 2 sqrt(omega) diag(J, 0) y' = M^-1/2 H M^-1/2 y at the ring.

    The mass-normalized system is split into the isotypic blocks and each block
    is solved on its own: planar blocks through their first-order companion,
    spatial blocks (no Coriolis term) through the Hermitian eigenvalues s,
    lambda = +-sqrt(s). Planar translations of the centre of mass form a
    defective pair at +-i sqrt(omega); they are split off and reported as
    structural together with every |lambda| < 1e-5 sqrt(max(1, omega)) (rotation
    and vertical translation). Structural eigenvalues stay out of the verdict.
    A massless centre is dropped from the system.
    """
    sys = cfg.body_system()
    hess = nbody_hess(cfg.configuration, sys)
    masses = np.repeat(sys.masses, 3)
    include_center = cfg.mu > 0
    if not include_center:
        hess, masses = hess[3:, 3:], masses[3:]
    scale = 1.0 / np.sqrt(masses)
    K = hess * np.outer(scale, scale)
    G = frame_generator(len(masses) // 3)
    speed = float(np.sqrt(cfg.omega))
    translations = _translations(masses)

    values: List[np.ndarray] = []
    structural: List[np.ndarray] = []
    for (k, kind), U in isotypic_basis(cfg.n, include_center).items():
        if not U.shape[1]:
            continue
        Kb = U.conj().T @ K @ U
        Kb = 0.5 * (Kb + Kb.conj().T)
        if kind == 'spatial':
            roots = np.sqrt(np.linalg.eigvalsh(Kb).astype(complex))
            values.append(np.concatenate([roots, -roots]))
            continue
        Gb = U.conj().T @ G @ U
        shifts = [U.conj().T @ v for v in translations]
        shifts = [xi for xi in shifts if np.linalg.norm(xi) > 1e-12]
        if shifts:
            R = spl.orth(np.column_stack(shifts))
            Q = spl.null_space(R.conj().T)
            structural.append(_companion_eigenvalues(R.conj().T @ Kb @ R, R.conj().T @ Gb @ R, speed))
            Kb, Gb = Q.conj().T @ Kb @ Q, Q.conj().T @ Gb @ Q
        values.append(_companion_eigenvalues(Kb, Gb, speed))

    spectrum = np.concatenate(values)
    small = np.abs(spectrum) < 1e-5 * np.sqrt(max(1.0, cfg.omega))
    rest = spectrum[~small]
    structural_values = np.concatenate(structural + [spectrum[small]])
    max_real = float(np.max(rest.real)) if rest.size else 0.0
    verdict = 'marginally stable' if max_real < stable_tol else 'unstable'
    logger.info(f"Ring n={cfg.n}, mu={cfg.mu}: max Re = {max_real:.3e} ({verdict}), "
                f"{len(structural_values)} structural eigenvalues")
    everything = np.concatenate([rest, structural_values])
    return StabilityReport(
        eigenvalues=everything,
        structural=structural_values,
        max_real_part=max_real,
        verdict=verdict,
        symmetry_defect=_pairing_defect(everything),
    )


def mu_sweep(n: int, mus: Sequence[float], settings: Optional[ScanSettings] = None) -> List[Dict]:
    """Event rows (mu, k, kind, nu0, eta, resonant) for every block over a grid of central masses."""
    rows: List[Dict] = []
    for mu in mus:
        cfg = maxwell_ring(n, float(mu))
        for event in scan_ring(cfg, settings):
            rows.append({
                'mu': float(mu),
                'k': int(event.k),
                'kind': event.kind,
                'nu0': event.nu0,
                'eta': event.eta,
                'resonant': event.resonant,
            })
    logger.info(f"mu sweep n={n}: {len(mus)} masses, {len(rows)} events")
    return rows


def empirical_thresholds(rows: List[Dict], mus: Sequence[float]) -> List[ThresholdRecord]:
    """
    Central masses where the number of events of a block changes between consecutive sweep values.

    These are observed thresholds only; no closed form is assumed.
    """
    counts: Dict[Tuple[int, str], Dict[float, int]] = defaultdict(lambda: defaultdict(int))
    for row in rows:
        counts[(row['k'], row['kind'])][row['mu']] += 1
    records: List[ThresholdRecord] = []
    mus = [float(m) for m in mus]
    for (k, kind), per_mu in sorted(counts.items()):
        series = [per_mu.get(m, 0) for m in mus]
        for a, b, ca, cb in zip(mus, mus[1:], series, series[1:]):
            if ca != cb:
                records.append(ThresholdRecord(
                    kind='m_plus_like',
                    k=k,
                    mu=float(np.sqrt(a * b)) if a > 0 else 0.5 * b,
                    bracket=(a, b),
                    value_left=float(ca),
                    value_right=float(cb),
                    crossings=abs(cb - ca),
                    block=kind,
                ))
    return records
