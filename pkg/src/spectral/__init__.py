"""Linearization blocks, Morse-index scans, thresholds and ring stability."""

from .blocks import (
    SpectralBlock,
    blocks_by_key,
    harmonic_lookup,
    mode_matrix,
    ring_blocks,
    ring_spectral_blocks,
    satellite_block,
    satellite_blocks,
)
from .morse import ZERO_TOL, AtCrossingError, morse_index
from .scanner import BifurcationEvent, planar_criterion, planar_event_frequencies, scan_bifurcations
from .survey import ScanSettings, scan_equilibria, scan_ring
from .thresholds import (
    StabilityReport,
    ThresholdRecord,
    empirical_thresholds,
    find_mu_k,
    linear_stability,
    mu_sweep,
    planar_block_determinant,
)

__all__ = [
    'SpectralBlock',
    'blocks_by_key',
    'harmonic_lookup',
    'mode_matrix',
    'ring_blocks',
    'ring_spectral_blocks',
    'satellite_block',
    'satellite_blocks',
    'ZERO_TOL',
    'AtCrossingError',
    'morse_index',
    'BifurcationEvent',
    'planar_criterion',
    'planar_event_frequencies',
    'scan_bifurcations',
    'ScanSettings',
    'scan_equilibria',
    'scan_ring',
    'StabilityReport',
    'ThresholdRecord',
    'empirical_thresholds',
    'find_mu_k',
    'linear_stability',
    'mu_sweep',
    'planar_block_determinant',
]
