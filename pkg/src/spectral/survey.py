"""Event surveys over every block of a satellite census or of the ring."""

import logging
from dataclasses import dataclass
from typing import List, Optional

from equilibria import EquilibriumPoint, RingConfiguration
from .blocks import SpectralBlock, harmonic_lookup, ring_spectral_blocks, satellite_blocks
from .scanner import BifurcationEvent, scan_bifurcations

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScanSettings:
    """Frequency grid and tolerances shared by all scans."""

    nu_min: Optional[float] = None
    nu_max: Optional[float] = None
    step: float = 1e-3
    tol: float = 1e-10
    zero_tol: float = 1e-10
    harmonics: int = 5
    resonance_tol: float = 1e-6


def _scan_all(blocks: List[SpectralBlock], settings: ScanSettings, source: Optional[int] = None) -> List[BifurcationEvent]:
    events: List[BifurcationEvent] = []
    for block in blocks:
        events.extend(scan_bifurcations(
            block,
            nu_min=settings.nu_min,
            nu_max=settings.nu_max,
            step=settings.step,
            tol=settings.tol,
            zero_tol=settings.zero_tol,
            harmonic=harmonic_lookup(blocks, block),
            harmonics=settings.harmonics,
            resonance_tol=settings.resonance_tol,
            source=source,
        ))
    return events


def scan_equilibria(points: List[EquilibriumPoint], settings: Optional[ScanSettings] = None) -> List[BifurcationEvent]:
    """Scan the planar and spatial blocks of every equilibrium; events carry the equilibrium index."""
    settings = settings or ScanSettings()
    events: List[BifurcationEvent] = []
    for index, eq in enumerate(points):
        events.extend(_scan_all(satellite_blocks(eq), settings, source=index))
    logger.info(f"Scanned {len(points)} equilibria: {len(events)} events")
    return events


def scan_ring(cfg: RingConfiguration, settings: Optional[ScanSettings] = None) -> List[BifurcationEvent]:
    """Scan all 2n ring blocks."""
    settings = settings or ScanSettings()
    events = _scan_all(ring_spectral_blocks(cfg), settings)
    logger.info(f"Scanned ring n={cfg.n}, mu={cfg.mu}: {len(events)} events")
    return events
