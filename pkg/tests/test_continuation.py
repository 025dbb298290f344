from dataclasses import replace

import numpy as np
import pytest

from continuation import (
    TERMINATIONS,
    ContinuationSettings,
    GalerkinModel,
    PeriodicProblem,
    PinningError,
    augment,
    branch_from_event,
    continue_branch,
    fourier_residual,
    kernel_direction,
    loop_from_coefficients,
    loop_inner,
    loop_to_coefficients,
    origin_for_ring,
    origin_for_satellite,
    real_derivative,
    real_jacobian,
    real_residual,
    refine_truncation,
)
from dynamics import PreconditionError, rotation_generator
from equilibria import find_satellite_equilibria
from spectral import satellite_blocks, scan_bifurcations, scan_ring
from symmetry import (
    FourierLoop,
    GroupElement,
    IsotropyLabel,
    act_loop,
    center_of_mass_defect,
    symmetry_residual,
)
from verification import closure_error


@pytest.fixture
def eight_start(binary, binary_satellite, triangular_point):
    """Origin and vertical event of the equilateral point (nu0 = 1)."""
    points = find_satellite_equilibria(binary)
    origin = origin_for_satellite(triangular_point, binary_satellite, points)
    _, spatial = satellite_blocks(triangular_point)
    (event,) = scan_bifurcations(spatial)
    return origin, event


def _smooth_loop(rng, center, L, amplitude=0.05):
    C = np.zeros((2 * L + 1, len(center)))
    C[0] = center
    decay = 0.5 ** np.repeat(np.arange(1, L + 1), 2)
    C[1:] = amplitude * decay[:, None] * rng.standard_normal((2 * L, len(center)))
    return C


def test_coefficient_conversions_truncate_and_pad(rng):
    C = rng.standard_normal((5, 3))
    loop = loop_from_coefficients(C, 1.2)
    assert (loop.L, loop.nu) == (2, 1.2)
    np.testing.assert_allclose(loop.evaluate(np.array([0.0]))[0], C[0] + C[1] + C[3], atol=1e-14)
    padded = loop_to_coefficients(loop, 3)
    np.testing.assert_allclose(padded[:5], C, atol=1e-14)
    np.testing.assert_array_equal(padded[5:], 0.0)
    np.testing.assert_allclose(loop_to_coefficients(loop, 1), C[:3], atol=1e-14)


def test_equilibria_are_constant_solutions(triangular_point, binary_satellite, ring3):
    loop = FourierLoop.constant(triangular_point.position, 4, 1.0)
    assert np.max(np.abs(fourier_residual(loop, 1.0, binary_satellite).coefficients)) < 1e-12
    ring_loop = FourierLoop.constant(ring3.configuration, 3, 1.7)
    assert np.max(np.abs(fourier_residual(ring_loop, 1.7, ring3.body_system()).coefficients)) < 1e-12


def test_residual_is_quadratic_along_the_kernel(triangular_point, binary_satellite):
    model = GalerkinModel(binary_satellite)
    norms = []
    for eps in (1e-4, 2e-4):
        C = np.zeros((9, 3))
        C[0] = triangular_point.position
        C[1, 2] = eps
        norms.append(np.linalg.norm(real_residual(C, 1.0, model)))
    assert norms[0] < 1e-6
    assert norms[1] / norms[0] == pytest.approx(4.0, rel=1e-2)


def test_jacobian_matches_finite_differences(triangular_point, binary_satellite, rng):
    model = GalerkinModel(binary_satellite)
    C = _smooth_loop(rng, triangular_point.position, 2)
    nu = 1.1
    J, d_nu = real_jacobian(C, nu, model)
    h = 1e-6
    flat = C.reshape(-1)
    fd = np.column_stack([
        (real_residual((flat + h * e).reshape(C.shape), nu, model)
         - real_residual((flat - h * e).reshape(C.shape), nu, model)).reshape(-1) / (2.0 * h)
        for e in np.eye(len(flat))
    ])
    np.testing.assert_allclose(J, fd, atol=1e-6)
    fd_nu = (real_residual(C, nu + h, model) - real_residual(C, nu - h, model)).reshape(-1) / (2.0 * h)
    np.testing.assert_allclose(d_nu, fd_nu, atol=1e-6)


def test_residual_is_orthogonal_to_the_symmetry_generators(ring3, triangular_point, binary_satellite, rng):
    for system, center in ((binary_satellite, triangular_point.position), (ring3.body_system(), ring3.configuration)):
        model = GalerkinModel(system)
        for _ in range(5):
            C = _smooth_loop(rng, center, 2)
            R = real_residual(C, float(rng.uniform(0.5, 2.0)), model)
            assert abs(loop_inner(R, real_derivative(C))) < 1e-10
            if model.is_nbody:
                A1 = rotation_generator(system.bodies)
                assert abs(loop_inner(R, C @ A1.T)) < 1e-10


def test_residual_is_equivariant(ring3, rng):
    system = ring3.body_system()
    loop = FourierLoop.from_real(_smooth_loop(rng, ring3.configuration, 3), 1.4)
    for g in (GroupElement(j=1, theta=ring3.zeta, phi=0.3), GroupElement(kappa=True), GroupElement(theta=0.7)):
        moved_first = fourier_residual(act_loop(g, loop), loop.nu, system)
        moved_after = act_loop(g, fourier_residual(loop, loop.nu, system))
        np.testing.assert_allclose(moved_first.coefficients, moved_after.coefficients, atol=1e-10)


def test_periodic_problem_preconditions(binary, binary_satellite, triangular_point):
    with pytest.raises(PreconditionError):
        PeriodicProblem(binary_satellite, IsotropyLabel.eight(), 0, triangular_point.position)
    with pytest.raises(PreconditionError):
        PeriodicProblem(binary_satellite, IsotropyLabel.planar_ring(2, 1), 4, triangular_point.position)
    with pytest.raises(PreconditionError):
        PeriodicProblem(binary.body_system(), IsotropyLabel.spatial_ring(2, 1), 4, binary.configuration)
    with pytest.raises(PreconditionError):
        origin_for_ring(binary)


def test_constant_loops_cannot_be_pinned(binary_satellite, triangular_point):
    problem = PeriodicProblem(binary_satellite, IsotropyLabel.eight(), 4, triangular_point.position)
    with pytest.raises(PinningError):
        augment(problem, FourierLoop.constant(triangular_point.position, 4, 1.0), 1.0)


def test_augmented_system_is_square_after_closing(binary_satellite, triangular_point):
    problem = PeriodicProblem(binary_satellite, IsotropyLabel.eight(), 4, triangular_point.position)
    C = np.zeros((9, 3))
    C[0] = triangular_point.position
    C[1, 2] = 1e-3
    system = augment(problem, FourierLoop.from_real(C, 1.0), 1.0)
    assert problem.pin == (1, 2)
    assert system.jacobian.shape == (problem.size + 1, problem.size + 2)
    assert system.residual.shape == (problem.size + 1,)


def test_kernel_direction_of_the_vertical_event(eight_start):
    origin, event = eight_start
    w = kernel_direction(event, origin)
    np.testing.assert_allclose(np.abs(w), [0.0, 0.0, 1.0], atol=1e-12)


def test_branch_start_on_the_vertical_family(eight_start):
    origin, event = eight_start
    branch = branch_from_event(event, origin)
    point = branch.points[0]
    assert point.residual < 1e-10
    assert point.symmetry_residual < 1e-10
    assert np.max(np.abs(point.multipliers)) < 1e-8
    assert point.nu == pytest.approx(1.0, abs=1e-4)
    assert branch.label.kind == 'eight_z2'
    assert symmetry_residual(point.loop, IsotropyLabel.eight()) < 1e-10


def test_branch_start_preconditions(eight_start):
    origin, event = eight_start
    with pytest.raises(PreconditionError):
        branch_from_event(event, origin, epsilon=0.5)
    with pytest.raises(PreconditionError):
        branch_from_event(replace(event, eta=0), origin)


def test_tangent_does_not_depend_on_the_start_amplitude(eight_start):
    origin, event = eight_start
    directions = []
    for eps in (1e-3, 5e-4):
        branch = branch_from_event(event, origin, epsilon=eps)
        problem = branch.problem
        C = problem.coefficients(branch.states[0][0] - problem.y_eq)
        mode_one = C[1:3].reshape(-1)
        directions.append(mode_one / np.linalg.norm(mode_one))
    assert np.linalg.norm(directions[0] - directions[1]) < 1e-4


@pytest.mark.slow
def test_vertical_family_continues_for_twenty_steps(eight_start):
    origin, event = eight_start
    settings = ContinuationSettings(h_max=0.02)
    branch = continue_branch(branch_from_event(event, origin, settings=settings), max_steps=20)
    assert branch.termination == 'max_steps'
    assert len(branch) == 21
    arclength = [p.arclength for p in branch.points]
    assert all(b > a for a, b in zip(arclength, arclength[1:]))
    assert max(p.symmetry_residual for p in branch.points) < 1e-8
    assert branch.max_multiplier() < 1e-8
    assert branch.points[-1].amplitude > branch.points[0].amplitude


def test_truncation_refinement_is_stable(eight_start):
    origin, event = eight_start
    branch = branch_from_event(event, origin)
    refined, change = refine_truncation(branch)
    assert refined.loop.L == 2 * branch.problem.L
    assert change < 1e-6
    assert refined.nu == pytest.approx(branch.points[0].nu, abs=1e-8)


def test_planar_family_stays_in_the_plane(binary, binary_satellite):
    points = find_satellite_equilibria(binary)
    saddle = next(eq for eq in points if eq.label == 'r1' and eq.coords[0] > 0)
    origin = origin_for_satellite(saddle, binary_satellite, points)
    planar, _ = satellite_blocks(saddle)
    (event,) = scan_bifurcations(planar)
    branch = continue_branch(branch_from_event(event, origin), max_steps=3)
    assert branch.label.kind == 'planar_z2'
    assert branch.termination in TERMINATIONS
    for point in branch.points:
        assert np.max(np.abs(point.loop.coefficients[:, 2])) < 1e-14
        assert point.residual < 1e-10


@pytest.mark.slow
def test_hip_hop_branch(ring4):
    origin = origin_for_ring(ring4)
    (event,) = [e for e in scan_ring(ring4) if e.block == (2, 'spatial')]
    settings = ContinuationSettings(h_max=0.02)
    branch = continue_branch(branch_from_event(event, origin, settings=settings), max_steps=20)
    assert branch.termination == 'max_steps'
    assert len(branch) == 21
    assert branch.max_multiplier() < 1e-8
    t = np.linspace(0.0, 2.0 * np.pi, 33)
    for point in branch.points:
        z = point.loop.evaluate(t)[:, 5::3]
        np.testing.assert_allclose(z[:, 1:], -z[:, :-1], atol=1e-8)
        assert point.symmetry_residual < 1e-8
    for point in (branch.points[0], branch.points[-1]):
        assert closure_error(point.loop, origin.system, dt=1e-3) < 1e-5


@pytest.mark.slow
def test_oscillating_ring_keeps_its_center_of_mass(ring3):
    origin = origin_for_ring(ring3)
    (event,) = [e for e in scan_ring(ring3) if e.block == (3, 'spatial')]
    branch = continue_branch(branch_from_event(event, origin), max_steps=5)
    t = np.linspace(0.0, 2.0 * np.pi, 33)
    for point in branch.points:
        assert center_of_mass_defect(point.loop, ring3.masses) < 1e-8
        z = point.loop.evaluate(t)[:, 5::3]
        np.testing.assert_allclose(z, np.repeat(z[:, :1], 3, axis=1), atol=1e-10)
