import numpy as np
import pytest

from equilibria import classify_equilibrium, maxwell_ring


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def ring3():
    return maxwell_ring(3, 1.0)


@pytest.fixture
def ring4():
    return maxwell_ring(4, 1.0)


@pytest.fixture
def binary():
    """Two unit masses without a central body: the restricted three-body setting."""
    return maxwell_ring(2, 0.0)


@pytest.fixture
def binary_satellite(binary):
    return binary.satellite_system()


@pytest.fixture
def triangular_point(binary, binary_satellite):
    """Equilateral point above the primaries (distance 2 from both)."""
    return classify_equilibrium(np.array([0.0, np.sqrt(3.0)]), binary, binary_satellite)
