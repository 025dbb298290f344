"""Frequency scans for Morse-index jumps and the closed-form planar criterion."""

import logging
from dataclasses import dataclass
from typing import Callable, Hashable, List, Optional

import numpy as np

from dynamics import ClassificationError
from symmetry import IsotropyLabel
from .blocks import SpectralBlock
from .morse import ZERO_TOL, complement_basis, compress

logger = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-8


@dataclass(frozen=True)
class BifurcationEvent:
    """
    A frequency where the Morse index of one block jumps.

    eta = index(nu0 + width/2) - index(nu0 - width/2); a negative eta means the
    index drops as nu grows through the crossing.
    """

    nu0: float
    eta: int
    block: Hashable
    kind: str
    k: Optional[int] = None
    label: Optional[IsotropyLabel] = None
    resonant: bool = False
    width: float = 0.0
    index_left: int = 0
    index_right: int = 0
    source: Optional[int] = None


class _CompressedBlock:
    """Block operators restricted to the complement of the deflation vectors."""

    def __init__(self, block: SpectralBlock):
        Q = complement_basis(block.size, block.deflation)
        self.mass = compress(block.mass, Q)
        self.coriolis = compress(block.coriolis, Q)
        self.stiffness = compress(block.stiffness, Q)
        self.speed = block.speed

    @property
    def empty(self) -> bool:
        return self.stiffness.size == 0

    def eigenvalues(self, nus: np.ndarray) -> np.ndarray:
        nus = np.atleast_1d(np.asarray(nus, dtype=float))[:, None, None]
        stack = nus ** 2 * self.mass - 2.0 * nus * self.speed * self.coriolis + self.stiffness
        return np.linalg.eigvalsh(stack)

    def index(self, nu: float) -> int:
        """Count of strictly negative eigenvalues, no zero band (used inside brackets)."""
        return int(np.sum(self.eigenvalues(nu)[0] < 0.0))


def planar_event_frequencies(T: float, D: float) -> List[float]:
    """Positive roots of nu^4 + (T - 4) nu^2 + D = 0, the zeros of the planar determinant."""
    roots = np.roots([1.0, T - 4.0, D])
    squares = sorted(float(r.real) for r in roots if abs(r.imag) < 1e-12 and r.real > 0)
    return [float(np.sqrt(s)) for s in squares]


def planar_criterion(T: float, D: float) -> int:
    """
    Predicted number of planar bifurcation frequencies.

    1 if D < 0; 2 if 0 < D < (2 - T/2)^2 and T < 4 (both roots of
    s^2 + (T-4) s + D positive); 0 otherwise.

    Raises:
        ClassificationError: If |D| <= 1e-8
    """
    if abs(D) <= DEGENERATE_TOL:
        raise ClassificationError(f"Degenerate planar Hessian: D = {D:.3e}")
    if D < 0:
        return 1
    if T < 4.0 and D < (2.0 - T / 2.0) ** 2:
        return 2
    return 0


def _grid_indices(block: _CompressedBlock, nus: np.ndarray, zero_tol: float) -> np.ndarray:
    values = block.eigenvalues(nus)
    indices = np.sum(values < -zero_tol, axis=1)
    # grid points sitting on a crossing are nudged off it
    for i in np.flatnonzero(np.any(np.abs(values) <= zero_tol, axis=1)):
        step = (nus[1] - nus[0]) if len(nus) > 1 else 1e-6
        indices[i] = block.index(nus[i] + 1e-3 * step)
    return indices


def scan_bifurcations(
    block: SpectralBlock,
    nu_min: Optional[float] = None,
    nu_max: Optional[float] = None,
    step: float = 1e-3,
    tol: float = 1e-10,
    zero_tol: float = ZERO_TOL,
    harmonic: Optional[Callable[[int], Optional[SpectralBlock]]] = None,
    harmonics: int = 5,
    resonance_tol: float = 1e-6,
    source: Optional[int] = None,
) -> List[BifurcationEvent]:
    """
    Detect every Morse-index change of a block on a frequency grid and refine it by bisection.

    A jump up followed by a jump down inside one grid cell cancels and is not
    seen; a small step keeps that unlikely.

    Args:
        block: Block to scan
        nu_min, nu_max: Scan range, defaults (step, block.nu_max())
        step: Coarse grid spacing
        tol: Bracket width after refinement
        harmonic: Maps l >= 2 to the block holding mode l of the same fixed subspace
        harmonics: Highest harmonic checked for resonance
        resonance_tol: Eigenvalue magnitude regarded as singular in the resonance check
        source: Index of the equilibrium the block belongs to, copied to the events

    Returns:
        Events in increasing frequency
    """
    nu_min = step if nu_min is None else max(nu_min, step)
    nu_max = block.nu_max() if nu_max is None else nu_max
    compressed = _CompressedBlock(block)
    if compressed.empty or nu_max <= nu_min:
        return []
    nus = np.arange(nu_min, nu_max + 0.5 * step, step)
    indices = _grid_indices(compressed, nus, zero_tol)
    events: List[BifurcationEvent] = []
    for i in np.flatnonzero(np.diff(indices)):
        grid_lo = lo = float(nus[i])
        grid_hi = hi = float(nus[i + 1])
        left = int(indices[i])
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if compressed.index(mid) == left:
                lo = mid
            else:
                hi = mid
        # an end still on the grid keeps its nudged count; a crossing there reads as zero
        left = int(indices[i]) if lo == grid_lo else compressed.index(lo)
        right = int(indices[i + 1]) if hi == grid_hi else compressed.index(hi)
        if left == right:
            continue
        nu0 = 0.5 * (lo + hi)
        resonant = _is_resonant(nu0, harmonic, harmonics, resonance_tol)
        events.append(BifurcationEvent(
            nu0=nu0,
            eta=right - left,
            block=block.key,
            kind=block.kind,
            k=block.k,
            label=block.label,
            resonant=resonant,
            width=hi - lo,
            index_left=left,
            index_right=right,
            source=source,
        ))
    logger.debug(f"Block {block.name}: {len(events)} events on ({nu_min:.3g}, {nu_max:.3g}]")
    return events


def _is_resonant(nu0: float, harmonic, harmonics: int, resonance_tol: float) -> bool:
    if harmonic is None:
        return False
    for l in range(2, harmonics + 1):
        other = harmonic(l)
        if other is None:
            continue
        compressed = _CompressedBlock(other)
        if compressed.empty:
            continue
        if np.min(np.abs(compressed.eigenvalues(l * nu0)[0])) < resonance_tol:
            logger.warning(f"Event at nu0={nu0:.10g} resonates with harmonic {l} of block {other.name}")
            return True
    return False
