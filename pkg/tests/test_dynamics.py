import numpy as np
import pytest

from dynamics import (
    BodySystem,
    CollisionError,
    PreconditionError,
    SatelliteSystem,
    State,
    angular_momentum,
    energy,
    frame_generator,
    inertial_positions,
    inertial_velocities,
    jacobi_constant,
    linear_momentum,
    nbody_acceleration_terms,
    nbody_grad,
    nbody_hess,
    nbody_potential,
    rotation_generator,
    satellite_field,
    satellite_grad,
    satellite_hess,
    satellite_potential,
    spatial_stiffness,
)


def _central_difference(f, x, h=1e-6):
    eye = np.eye(len(x))
    return np.array([(f(x + h * e) - f(x - h * e)) / (2.0 * h) for e in eye])


def test_satellite_gradient_matches_finite_differences(binary_satellite):
    p = np.array([0.3, 1.1, 0.2])
    fd = _central_difference(lambda q: satellite_potential(q, binary_satellite), p)
    np.testing.assert_allclose(satellite_grad(p, binary_satellite), fd, atol=1e-7)


def test_satellite_hessian_is_symmetric_and_matches_gradient(binary_satellite):
    p = np.array([-0.4, 0.9, 0.1])
    H = satellite_hess(p, binary_satellite)
    np.testing.assert_allclose(H, H.T, rtol=0, atol=1e-15)
    fd = _central_difference(lambda q: satellite_grad(q, binary_satellite), p).T
    np.testing.assert_allclose(H, fd, atol=1e-6)


def test_satellite_hessian_is_symmetric_bit_for_bit(binary_satellite, rng):
    pts = rng.uniform(-0.5, 0.5, (25, 3)) + np.array([0.0, 1.5, 0.0])
    batch = satellite_hess(pts, binary_satellite)
    assert np.array_equal(batch, np.swapaxes(batch, -1, -2))
    for p in pts[:5]:
        H = satellite_hess(p, binary_satellite)
        assert np.array_equal(H, H.T)


def test_satellite_field_rescales_with_frequency(binary_satellite, rng):
    p = np.array([0.2, 1.3, 0.1])
    v = rng.standard_normal(3)
    _, acc = satellite_field(State(p, v), 1.0, binary_satellite)
    # nu = 1 is the unscaled equation x'' + 2 diag(J, 0) x' = grad V
    np.testing.assert_allclose(acc + 2.0 * frame_generator(1) @ v, satellite_grad(p, binary_satellite), atol=1e-14)
    for nu in (0.5, 2.0):
        vel, scaled = satellite_field(State(p, v), nu, binary_satellite)
        # a loop x(t / nu) in rescaled time has velocity v when the unscaled one has nu v
        _, unscaled = satellite_field(State(p, nu * v), 1.0, binary_satellite)
        np.testing.assert_array_equal(vel, v)
        np.testing.assert_allclose(scaled, unscaled / nu ** 2, rtol=1e-13, atol=1e-14)


def test_satellite_batches_agree_with_single_points(binary_satellite, rng):
    pts = rng.uniform(-0.5, 0.5, (7, 3)) + np.array([0.0, 1.5, 0.0])
    batch = satellite_grad(pts, binary_satellite)
    for p, g in zip(pts, batch):
        np.testing.assert_allclose(satellite_grad(p, binary_satellite), g, rtol=1e-14)


def test_satellite_potential_raises_at_a_primary(binary_satellite):
    with pytest.raises(CollisionError) as info:
        satellite_potential(np.array([1.0, 0.0, 0.0]), binary_satellite)
    assert info.value.distance < binary_satellite.eps_coll


def test_triangular_point_hessian(binary_satellite):
    """Masses 4 at (+-1, 0) seen from distance 2: planar diag(3/4, 9/4), vertical -1."""
    p = np.array([0.0, np.sqrt(3.0), 0.0])
    np.testing.assert_allclose(satellite_grad(p, binary_satellite), 0.0, atol=1e-14)
    np.testing.assert_allclose(satellite_hess(p, binary_satellite), np.diag([0.75, 2.25, -1.0]), atol=1e-14)
    assert spatial_stiffness(p, binary_satellite) == pytest.approx(-1.0, abs=1e-14)


def test_satellite_system_validation():
    with pytest.raises(PreconditionError):
        SatelliteSystem(anchors=[[0.0, 0.0], [1.0, 0.0]], masses=[1.0])
    with pytest.raises(PreconditionError):
        SatelliteSystem(anchors=[[0.0, 0.0]], masses=[0.0])
    with pytest.raises(PreconditionError):
        SatelliteSystem(anchors=[[0.0, 0.0], [0.0, 0.0]], masses=[1.0, 1.0])


def test_binary_satellite_drops_the_empty_center(binary, binary_satellite):
    assert len(binary_satellite.masses) == 2
    np.testing.assert_allclose(binary_satellite.masses, 1.0 / binary.omega)
    assert binary_satellite.time_scale == pytest.approx(np.sqrt(binary.omega))


def test_body_system_validation():
    with pytest.raises(PreconditionError):
        BodySystem(masses=[1.0, 1.0], omega=1.0)
    with pytest.raises(PreconditionError):
        BodySystem(masses=[-1.0, 1.0, 1.0], omega=1.0)
    with pytest.raises(PreconditionError):
        BodySystem(masses=[1.0, 1.0, 0.0], omega=1.0)
    with pytest.raises(PreconditionError):
        BodySystem(masses=[1.0, 1.0, 1.0], omega=0.0)


def test_ring_is_a_critical_point_of_the_amended_potential(ring3, ring4):
    for cfg in (ring3, ring4):
        sys = cfg.body_system()
        assert np.max(np.abs(nbody_grad(cfg.configuration, sys))) < 1e-12


def test_nbody_derivatives(ring3, rng):
    sys = ring3.body_system()
    x = ring3.configuration + 0.05 * rng.standard_normal(sys.dim)
    fd = _central_difference(lambda q: nbody_potential(q, sys), x)
    np.testing.assert_allclose(nbody_grad(x, sys), fd, atol=1e-6)
    H = nbody_hess(x, sys)
    assert np.array_equal(H, H.T)
    fd_hess = _central_difference(lambda q: nbody_grad(q, sys), x).T
    np.testing.assert_allclose(H, fd_hess, atol=1e-5)


def test_acceleration_terms_defined_for_massless_center(binary):
    sys = binary.body_system()
    acc = nbody_acceleration_terms(binary.configuration, sys)
    assert np.all(np.isfinite(acc))
    np.testing.assert_allclose(nbody_grad(binary.configuration, sys)[:3], 0.0)


def test_rotation_is_a_symmetry_of_the_potential(ring3, rng):
    sys = ring3.body_system()
    x = ring3.configuration + 0.05 * rng.standard_normal(sys.dim)
    A1 = rotation_generator(sys.bodies)
    assert abs(nbody_grad(x, sys) @ (A1 @ x)) < 1e-12


def test_nbody_collision_is_reported(ring3):
    sys = ring3.body_system()
    x = ring3.configuration.copy()
    x[3:6] = x[6:9]
    with pytest.raises(CollisionError):
        nbody_potential(x, sys)


def test_state_shapes():
    s = State(np.zeros(6))
    assert s.velocity.shape == (6,)
    with pytest.raises(PreconditionError):
        State(np.zeros(6), np.zeros(3))
    np.testing.assert_array_equal(State.from_vector(np.arange(6.0)).velocity, [3.0, 4.0, 5.0])


def test_ring_at_rest_conserved_quantities(ring3):
    sys = ring3.body_system()
    s = State(ring3.configuration)
    # bodies on the unit circle: sum m c |u|^2 = n sqrt(omega)
    assert angular_momentum(s, sys) == pytest.approx(3.0 * np.sqrt(ring3.omega))
    np.testing.assert_allclose(linear_momentum(s, sys, 0.0), 0.0, atol=1e-14)
    assert energy(s, 1.0, sys) == pytest.approx(float(nbody_potential(ring3.configuration, sys)))


def test_inertial_positions_rotate_with_the_frame(ring4):
    sys = ring4.body_system()
    period = 2.0 * np.pi / np.sqrt(ring4.omega)
    start = inertial_positions(ring4.configuration, sys, 0.0)
    np.testing.assert_allclose(start, ring4.configuration)
    np.testing.assert_allclose(inertial_positions(ring4.configuration, sys, period), start, atol=1e-12)
    quarter = inertial_positions(ring4.configuration, sys, period / 4).reshape(-1, 3)
    # body 1 at angle pi/2 moves to angle pi
    np.testing.assert_allclose(quarter[1, :2], [-1.0, 0.0], atol=1e-12)


def test_jacobi_constant_is_the_satellite_energy(binary_satellite, triangular_point):
    s = State(triangular_point.position + np.array([0.01, 0.0, 0.02]), np.array([0.0, 0.03, -0.01]))
    assert jacobi_constant(s, 1.3, binary_satellite) == energy(s, 1.3, binary_satellite)
    at_rest = State(triangular_point.position)
    assert jacobi_constant(at_rest, 1.0, binary_satellite) == pytest.approx(
        float(satellite_potential(triangular_point.position, binary_satellite)), abs=1e-14)


def test_jacobi_constant_needs_a_satellite(ring3):
    with pytest.raises(PreconditionError):
        jacobi_constant(State(ring3.configuration), 1.0, ring3.body_system())


def test_inertial_velocities_of_the_rigid_ring(ring4):
    sys = ring4.body_system()
    t = 0.7
    v = inertial_velocities(State(ring4.configuration), sys, t).reshape(-1, 3)
    q = inertial_positions(ring4.configuration, sys, t).reshape(-1, 3)
    # rigid rotation at speed sqrt(omega): v = sqrt(omega) J q
    np.testing.assert_allclose(v[:, 0], -np.sqrt(ring4.omega) * q[:, 1], atol=1e-14)
    np.testing.assert_allclose(v[:, 1], np.sqrt(ring4.omega) * q[:, 0], atol=1e-14)
