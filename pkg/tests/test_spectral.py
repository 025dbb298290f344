import numpy as np
import pytest

from dynamics import ClassificationError
from equilibria import find_satellite_equilibria, maxwell_ring
from spectral import (
    AtCrossingError,
    ScanSettings,
    blocks_by_key,
    empirical_thresholds,
    find_mu_k,
    harmonic_lookup,
    linear_stability,
    mode_matrix,
    morse_index,
    mu_sweep,
    planar_block_determinant,
    planar_criterion,
    planar_event_frequencies,
    ring_blocks,
    ring_spectral_blocks,
    satellite_block,
    satellite_blocks,
    scan_bifurcations,
    scan_equilibria,
    scan_ring,
)


@pytest.mark.parametrize('T, D, expected', [(3.0, 27.0 / 16.0, 0), (1.0, -2.0, 1), (1.0, 0.5, 2), (5.0, 0.5, 0), (1.0, 3.0, 0)])
def test_planar_criterion(T, D, expected):
    assert planar_criterion(T, D) == expected
    assert len(planar_event_frequencies(T, D)) == expected


def test_planar_criterion_rejects_degenerate_hessians():
    with pytest.raises(ClassificationError):
        planar_criterion(1.0, 1e-9)


def test_satellite_block_determinant_matches_the_quartic(triangular_point):
    nu = 0.7
    planar = satellite_block(triangular_point, nu)[:2, :2]
    T, D = triangular_point.T, triangular_point.D
    assert np.linalg.det(planar).real == pytest.approx(nu ** 4 + (T - 4.0) * nu ** 2 + D, abs=1e-12)
    np.testing.assert_allclose(planar, planar.conj().T)


def test_triangular_point_has_one_spatial_event(triangular_point):
    planar, spatial = satellite_blocks(triangular_point)
    assert scan_bifurcations(planar) == []
    events = scan_bifurcations(spatial)
    assert len(events) == 1
    event = events[0]
    assert event.nu0 == pytest.approx(1.0, abs=1e-8)
    assert event.eta == -1
    assert event.label.kind == 'eight_z2'
    assert event.width <= 1e-10


def test_binary_planar_events_follow_the_criterion(binary):
    points = find_satellite_equilibria(binary)
    for eq in points:
        planar, spatial = satellite_blocks(eq)
        expected = planar_event_frequencies(eq.T, eq.D)
        found = [e.nu0 for e in scan_bifurcations(planar)]
        np.testing.assert_allclose(found, expected, atol=1e-8)
        (event,) = scan_bifurcations(spatial)
        assert event.nu0 ** 2 == pytest.approx(-eq.hessian[2, 2], abs=1e-8)


def test_scan_equilibria_tags_the_source(binary):
    points = find_satellite_equilibria(binary)
    events = scan_equilibria(points, ScanSettings())
    assert {e.source for e in events} == set(range(len(points)))
    assert all(e.eta != 0 for e in events)


def test_morse_index_with_deflation():
    A = np.diag([-2.0, 0.0, 3.0])
    with pytest.raises(AtCrossingError):
        morse_index(A)
    assert morse_index(A, deflation=[np.array([0.0, 1.0, 0.0])]) == 1
    assert morse_index(np.diag([-1.0, -1.0]), deflation=[np.eye(2)[0], np.eye(2)[1]]) == 0


@pytest.mark.parametrize('n', [3, 4, 5, 6])
@pytest.mark.parametrize('mu', [0.5, 5.0])
def test_ring_blocks_reproduce_the_dense_spectrum(n, mu):
    cfg = maxwell_ring(n, mu)
    for nu in (0.3, 1.1, 2.7):
        dense = np.linalg.eigvalsh(mode_matrix(cfg, nu))
        decomposition = ring_blocks(cfg, nu)
        np.testing.assert_allclose(decomposition.eigenvalues(), dense, atol=1e-9)
        assert len(decomposition.blocks) == 2 * n


def test_spectral_blocks_agree_with_the_decomposition(ring4):
    nu = 1.3
    blocks = blocks_by_key(ring_spectral_blocks(ring4))
    decomposition = ring_blocks(ring4, nu)
    for key, block in decomposition.blocks.items():
        np.testing.assert_allclose(
            np.linalg.eigvalsh(blocks[key].matrix(nu)),
            np.linalg.eigvalsh(block),
            atol=1e-10,
        )


def test_tilt_is_deflated_in_the_first_spatial_blocks(ring4):
    blocks = blocks_by_key(ring_spectral_blocks(ring4))
    for key in ((1, 'spatial'), (3, 'spatial')):
        block = blocks[key]
        assert len(block.deflation) == 1
        xi = block.deflation[0]
        nu = 0.8
        np.testing.assert_allclose(block.matrix(nu) @ xi, (nu ** 2 - ring4.omega) * (block.mass @ xi), atol=1e-10)
    assert blocks[(2, 'spatial')].deflation == []


def test_hip_hop_event_frequency(ring4):
    """z_j = (-1)^j crosses at nu^2 = mu + sum_p (1 - cos(k p zeta)) / (2 sin(p zeta / 2))^3."""
    n, k, mu = 4, 2, 1.0
    zeta = 2.0 * np.pi / n
    p = np.arange(1, n)
    expected = mu + np.sum((1.0 - np.cos(k * p * zeta)) / (2.0 * np.sin(p * zeta / 2.0)) ** 3)
    events = [e for e in scan_ring(ring4) if e.block == (2, 'spatial')]
    assert len(events) == 1
    assert events[0].nu0 ** 2 == pytest.approx(expected, abs=1e-8)
    assert events[0].label.hip_hop


def test_oscillating_ring_event_frequency(ring3):
    events = [e for e in scan_ring(ring3) if e.block == (3, 'spatial')]
    assert len(events) == 1
    assert events[0].nu0 ** 2 == pytest.approx(ring3.n + ring3.mu, abs=1e-8)
    assert events[0].label.oscillating_ring


def test_crossing_on_a_grid_point_is_kept(ring3):
    block = blocks_by_key(ring_spectral_blocks(ring3))[(3, 'spatial')]
    # nu0 = 2 is a point of the 1e-3 grid and falls between points of the other
    for step in (1e-3, 1.1e-3):
        events = scan_bifurcations(block, step=step)
        assert len(events) == 1
        assert events[0].nu0 ** 2 == pytest.approx(4.0, abs=1e-8)
        assert (events[0].index_left, events[0].index_right, events[0].eta) == (1, 0, -1)


def test_harmonic_lookup_follows_the_isotropy(ring4):
    blocks = ring_spectral_blocks(ring4)
    table = blocks_by_key(blocks)
    lookup = harmonic_lookup(blocks, table[(1, 'spatial')])
    assert lookup(2).key == (2, 'planar')
    assert lookup(3).key == (3, 'spatial')
    lookup = harmonic_lookup(blocks, table[(2, 'spatial')])
    assert lookup(2).key == (4, 'planar')


def test_mu_k_thresholds_of_the_hexagon():
    n = 6
    records = {k: find_mu_k(n, k) for k in range(1, n)}
    for k in (1, 3, 5):
        record = records[k]
        assert record.found
        assert record.crossings == 1
        left, right = record.bracket
        assert right - left <= 1e-9
    assert records[1].mu == pytest.approx(records[5].mu, abs=1e-8)
    # blocks 2 and 4 stay nonsingular for every positive central mass
    for k in (2, 4):
        assert not records[k].found
        assert records[k].value_left > 0 and records[k].value_right > 0


def test_hexagon_block_three_degenerates_at_the_closed_form_mass():
    """Block k = n/2 of the hexagon decouples radial from tangential: mu_3 = (7/4 - sqrt(3)) / 3."""
    record = find_mu_k(6, 3)
    assert record.mu == pytest.approx((1.75 - np.sqrt(3.0)) / 3.0, abs=1e-9)
    lo, hi = record.bracket
    assert np.sign(planar_block_determinant(6, 3, lo)) != np.sign(planar_block_determinant(6, 3, hi))


def test_hexagon_block_two_determinant_is_linear_with_a_negative_root():
    d1, d2, d3 = (planar_block_determinant(6, 2, mu) for mu in (1.0, 2.0, 3.0))
    assert d2 - d1 == pytest.approx(d3 - d2, rel=1e-9)
    slope = d2 - d1
    assert slope == pytest.approx(17.915, abs=1e-3)
    assert 1.0 - d1 / slope == pytest.approx(-0.2201, abs=1e-3)


@pytest.mark.parametrize('mu, verdict', [(1000.0, 'marginally stable'), (0.01, 'unstable')])
def test_heptagon_stability(mu, verdict):
    report = linear_stability(maxwell_ring(7, mu))
    assert report.verdict == verdict
    assert report.symmetry_defect < 1e-4


def test_heptagon_spectrum_solves_the_mode_equation():
    cfg = maxwell_ring(7, 1000.0)
    report = linear_stability(cfg)
    assert len(report.eigenvalues) == 2 * 3 * 8
    # rotation, vertical translation and the two planar centre-of-mass pairs
    assert len(report.structural) == 8
    assert report.max_real_part < 1e-9
    structural = set(np.round(report.structural, 12).tolist())
    for value in report.eigenvalues:
        if np.round(value, 12) in structural:
            continue
        singular = np.linalg.svd(mode_matrix(cfg, value.imag), compute_uv=False)
        assert singular[-1] < 1e-8 * singular[0]


def test_mu_sweep_tracks_the_oscillating_ring():
    mus = [0.5, 5.0]
    rows = mu_sweep(4, mus, ScanSettings(step=1e-2))
    assert {row['mu'] for row in rows} == set(mus)
    for mu in mus:
        oscillating = [r for r in rows if r['mu'] == mu and r['k'] == 4 and r['kind'] == 'spatial']
        assert len(oscillating) == 1
        assert oscillating[0]['nu0'] ** 2 == pytest.approx(4.0 + mu, abs=1e-6)


def test_empirical_thresholds_mark_count_changes():
    rows = [
        {'mu': 0.1, 'k': 2, 'kind': 'planar'},
        {'mu': 1.0, 'k': 2, 'kind': 'planar'},
        {'mu': 1.0, 'k': 2, 'kind': 'planar'},
        {'mu': 0.1, 'k': 3, 'kind': 'spatial'},
        {'mu': 1.0, 'k': 3, 'kind': 'spatial'},
        {'mu': 10.0, 'k': 3, 'kind': 'spatial'},
    ]
    records = empirical_thresholds(rows, [0.1, 1.0, 10.0])
    assert [(r.k, r.block, r.bracket) for r in records] == [(2, 'planar', (0.1, 1.0)), (2, 'planar', (1.0, 10.0))]
    assert records[0].mu == pytest.approx(np.sqrt(0.1))
    assert records[0].crossings == 1
    assert records[1].crossings == 2
    assert all(r.kind == 'm_plus_like' for r in records)
