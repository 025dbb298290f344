"""Maxwell ring relative equilibria and satellite equilibria over the ring."""

from .ring import RingConfiguration, maxwell_ring, ring_residual, ring_sum, polygon_pattern
from .satellite_search import (
    LABELS,
    SearchGrid,
    EquilibriumPoint,
    classify_equilibrium,
    find_satellite_equilibria,
    morse_census,
    polish,
)

__all__ = [
    'RingConfiguration',
    'maxwell_ring',
    'ring_residual',
    'ring_sum',
    'polygon_pattern',
    'LABELS',
    'SearchGrid',
    'EquilibriumPoint',
    'classify_equilibrium',
    'find_satellite_equilibria',
    'morse_census',
    'polish',
]
