from collections import Counter

import numpy as np
import pytest

from dynamics import PreconditionError, planar_rotation
from equilibria import (
    LABELS,
    SearchGrid,
    classify_equilibrium,
    find_satellite_equilibria,
    maxwell_ring,
    morse_census,
    polish,
    polygon_pattern,
    ring_residual,
    ring_sum,
)


@pytest.mark.parametrize('n', range(2, 10))
@pytest.mark.parametrize('mu', [0.0, 0.5, 2.0, 100.0])
def test_maxwell_ring_is_a_relative_equilibrium(n, mu):
    cfg = maxwell_ring(n, mu)
    assert ring_residual(cfg) < 1e-10
    assert cfg.omega == pytest.approx(mu + cfg.s1)


def test_ring_sum_of_the_triangle():
    # the double nearest 1/sqrt(3); 1.0 / np.sqrt(3.0) rounds one ulp above it
    assert ring_sum(3) == 0.5773502691896257
    assert ring_sum(3) == pytest.approx(1.0 / np.sqrt(3.0), abs=2e-16)
    assert ring_sum(2) == 0.25


def test_ring_layout(ring4):
    assert ring4.positions.shape == (5, 2)
    np.testing.assert_array_equal(ring4.positions[0], [0.0, 0.0])
    np.testing.assert_allclose(np.linalg.norm(ring4.positions[1:], axis=1), 1.0)
    np.testing.assert_array_equal(ring4.masses, [1.0, 1.0, 1.0, 1.0, 1.0])
    assert ring4.configuration.shape == (15,)


def test_maxwell_ring_rejects_bad_input():
    with pytest.raises(PreconditionError):
        maxwell_ring(1, 0.0)
    with pytest.raises(PreconditionError):
        maxwell_ring(3, -0.1)


@pytest.mark.parametrize('n, k, expected', [(6, 1, (6, 1)), (6, 2, (3, 2)), (6, 3, (2, 3)), (6, 6, (1, 6)), (5, 2, (5, 1))])
def test_polygon_pattern(n, k, expected):
    assert polygon_pattern(n, k) == expected


def test_polygon_pattern_rejects_k_out_of_range():
    with pytest.raises(PreconditionError):
        polygon_pattern(4, 0)


def test_triangular_point_classification(triangular_point):
    assert triangular_point.T == pytest.approx(3.0, abs=1e-12)
    assert triangular_point.D == pytest.approx(27.0 / 16.0, abs=1e-12)
    assert triangular_point.morse_index == 0
    assert triangular_point.label == 'r3'
    assert triangular_point.ray == 'bisector'


def test_classify_rejects_non_equilibria(binary, binary_satellite):
    with pytest.raises(PreconditionError):
        classify_equilibrium(np.array([0.5, 0.5]), binary, binary_satellite)


def test_binary_census(binary):
    points = find_satellite_equilibria(binary)
    assert len(points) == 5
    assert sum(eq.D > 0 for eq in points) == 2
    assert sum(eq.D < 0 for eq in points) == 3
    labels = Counter(eq.label for eq in points)
    assert labels == Counter({'r3': 2, 'r1': 2, 'other': 1})
    assert all(eq.label in LABELS for eq in points)
    census = morse_census(points, punctures=2)
    assert census['minima'] == 2 and census['saddles'] == 3
    assert census['euler'] == census['expected_euler'] == -1
    assert max(eq.grad_norm for eq in points) < 1e-8


def test_binary_collinear_points(binary):
    points = find_satellite_equilibria(binary)
    outer = sorted(eq.coords[0] for eq in points if eq.label == 'r1')
    # x - 4/(x-1)^2 - 4/(x+1)^2 = 0 beyond the primaries
    x = outer[1]
    assert x - 4.0 / (x - 1.0) ** 2 - 4.0 / (x + 1.0) ** 2 == pytest.approx(0.0, abs=1e-9)
    assert outer[0] == pytest.approx(-x, abs=1e-9)


def test_search_is_deterministic(binary):
    grid = SearchGrid(angles=120, radii=30)
    first = find_satellite_equilibria(binary, grid)
    second = find_satellite_equilibria(binary, grid)
    assert [tuple(eq.coords) for eq in first] == [tuple(eq.coords) for eq in second]


def _orbit_labels(points):
    orbits = {}
    for eq in points:
        orbits.setdefault(eq.orbit_id, []).append(eq.label)
    return orbits


@pytest.fixture(scope='module')
def weighted_triangle():
    cfg = maxwell_ring(3, 2.0)
    return cfg, find_satellite_equilibria(cfg)


def test_triangle_with_central_mass_has_three_ray_orbits(weighted_triangle):
    _, points = weighted_triangle
    counts = Counter(eq.label for eq in points)
    assert counts['r1'] == counts['r2'] == counts['r3'] == 3
    orbits = _orbit_labels(points)
    for label in ('r1', 'r2', 'r3'):
        assert sum(members == [label] * 3 for members in orbits.values()) == 1
    for eq in points:
        if eq.label in ('r1', 'r2', 'r3'):
            assert eq.ray in ('body', 'bisector')
    census = morse_census(points, punctures=4)
    assert census['euler'] == census['expected_euler']


def test_rotated_equilibria_polish_back_onto_the_set(weighted_triangle):
    cfg, points = weighted_triangle
    sys = cfg.satellite_system()
    coords = np.array([eq.coords for eq in points])
    for eq in points:
        q = polish(planar_rotation(cfg.zeta) @ eq.coords, sys)
        assert np.min(np.linalg.norm(coords - q, axis=1)) < 1e-8


def test_small_central_mass_adds_an_interior_orbit():
    cfg = maxwell_ring(3, 0.005)
    points = find_satellite_equilibria(cfg)
    counts = Counter(eq.label for eq in points)
    assert counts['r1'] == counts['r2'] == 3
    extra = {eq.orbit_id for eq in points if eq.label == 'extra'}
    members = {orbit_id: [eq for eq in points if eq.orbit_id == orbit_id] for orbit_id in extra}
    for orbit in members.values():
        assert [eq.label for eq in orbit] == ['extra'] * 3
    # at least one of them lies strictly inside the ring
    assert any(all(eq.radius < 1.0 for eq in orbit) for orbit in members.values())
