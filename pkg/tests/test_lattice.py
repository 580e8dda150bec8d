import numpy as np
import pytest

from src.errors import ConfigError, DegenerateHybridizationError
from src.lattice import (
    BilayerLattice,
    DisorderRealization,
    KPoint,
    band_energies,
    band_structure,
    bloch_kernel,
    build_realspace_hamiltonian,
    chiral_operator,
    density_of_states,
    dispersion_f,
    gap_halfwidth,
    polariton_angles,
    thermal_occupation,
)


def test_dispersion_examples():
    assert dispersion_f(KPoint(0, 0)) == pytest.approx(4.0)
    assert dispersion_f(KPoint(np.pi / 2, np.pi / 2)) == pytest.approx(0.0, abs=1e-15)
    assert dispersion_f(KPoint(np.pi, 0)) == pytest.approx(0.0, abs=1e-15)


def test_kpoint_wraps_into_zone():
    k = KPoint(np.pi, 3 * np.pi / 2)
    assert -np.pi <= k.k_x < np.pi
    assert k.k_y == pytest.approx(-np.pi / 2)


def test_band_energies_examples():
    lat = BilayerLattice(5, 5, eta=-1.0, G=0.25)
    assert band_energies(KPoint(np.pi / 2, np.pi / 2), lat) == pytest.approx((0.25, -0.25))
    w_u, w_l = band_energies(KPoint(0, 0), lat)
    assert w_u == pytest.approx(np.sqrt(16.0625))
    assert w_l == pytest.approx(-np.sqrt(16.0625))

    lat4 = BilayerLattice(5, 5, eta=-4.0, G=1.0)
    assert band_energies(KPoint(0, 0), lat4) == pytest.approx((-6 + np.sqrt(101), -6 - np.sqrt(101)))


def test_bloch_kernel_chiral_for_eta_minus_one():
    lat = BilayerLattice(5, 5, eta=-1.0, G=0.3)
    sigma_y = np.array([[0, -1j], [1j, 0]])
    for k in (KPoint(0.1, 0.7), KPoint(-2.0, 1.3), KPoint(0, 0)):
        H = bloch_kernel(k, lat)
        np.testing.assert_allclose(H, H.conj().T)
        np.testing.assert_allclose(H @ sigma_y + sigma_y @ H, 0, atol=1e-14)


def test_polariton_angles():
    lat = BilayerLattice(5, 5, eta=-1.0, G=0.25)
    s, c = polariton_angles(KPoint(np.pi / 2, np.pi / 2), lat)
    assert s == pytest.approx(1 / np.sqrt(2))
    assert c == pytest.approx(1 / np.sqrt(2))
    s, c = polariton_angles(KPoint(0, 0), lat)
    assert s**2 + c**2 == pytest.approx(1.0, abs=1e-12)


def test_angles_swap_under_pi_shift():
    lat = BilayerLattice(5, 5, eta=-1.0, G=0.25)
    bands = band_structure(lat, 64)
    # k + (pi, pi) sits 32 grid steps away along both axes
    shifted_s = np.roll(bands.sin_theta, (32, 32), axis=(0, 1))
    np.testing.assert_allclose(shifted_s, bands.cos_theta, atol=1e-12)
    np.testing.assert_allclose(bands.sin_theta**2 + bands.cos_theta**2, 1.0, atol=1e-12)


def test_angles_need_hybridization():
    lat = BilayerLattice(5, 5, eta=-1.0, G=0.0)
    with pytest.raises(DegenerateHybridizationError):
        polariton_angles(KPoint(0.3, 0.2), lat)


@pytest.mark.parametrize("eta", [-1.0, -0.5, -4.0])
def test_chiral_pairing_of_bands(eta):
    lat = BilayerLattice(5, 5, eta=eta, G=0.7)
    bands = band_structure(lat, 32)
    shifted_l = np.roll(bands.omega_l, (16, 16), axis=(0, 1))
    np.testing.assert_allclose(bands.omega_u, -shifted_l, atol=1e-12)
    assert np.all(bands.omega_u >= bands.omega_l)


def test_gap_halfwidth():
    assert gap_halfwidth(BilayerLattice(5, 5, eta=-1.0, G=0.25)) == pytest.approx(0.25)
    assert gap_halfwidth(BilayerLattice(5, 5, eta=-4.0, G=1.0)) == pytest.approx(0.8)
    with pytest.raises(ConfigError):
        gap_halfwidth(BilayerLattice(5, 5, eta=1.0, G=1.0))


def test_gap_matches_grid_minimum():
    lat = BilayerLattice(5, 5, eta=-1.0, G=0.25)
    bands = band_structure(lat, 512)
    assert np.min(np.abs(bands.omega_u)) == pytest.approx(0.25, abs=1e-10)


def test_small_periodic_spectrum_is_symmetric():
    lat = BilayerLattice(3, 3, eta=-1.0, G=0.25, boundary="periodic")
    w = np.linalg.eigvalsh(build_realspace_hamiltonian(lat).toarray())
    np.testing.assert_allclose(np.sort(w), -np.sort(w)[::-1], atol=1e-12)


def test_vertical_bond_is_G():
    lat = BilayerLattice(4, 4, eta=-1.0, G=0.25)
    H = build_realspace_hamiltonian(lat)
    assert H[lat.index(1, 2, 1), lat.index(2, 2, 1)] == pytest.approx(0.25)
    assert H[lat.index(1, 2, 1), lat.index(1, 3, 1)] == pytest.approx(1.0)
    assert H[lat.index(2, 2, 1), lat.index(2, 3, 1)] == pytest.approx(-1.0)
    assert H.diagonal().max() == 0


def test_periodic_spectrum_matches_bands():
    lat = BilayerLattice(8, 8, eta=-1.0, G=0.25, boundary="periodic")
    w = np.linalg.eigvalsh(build_realspace_hamiltonian(lat).toarray())
    bands = band_structure(lat, 8)
    expected = np.sort(np.concatenate([bands.omega_u.ravel(), bands.omega_l.ravel()]))
    np.testing.assert_allclose(w, expected, atol=1e-10)


def test_periodic_band_edges():
    lat = BilayerLattice(20, 20, eta=-1.0, G=0.25, boundary="periodic")
    w = np.linalg.eigvalsh(build_realspace_hamiltonian(lat).toarray())
    assert w.max() == pytest.approx(np.sqrt(16 + 0.25**2), abs=1e-10)
    assert np.min(np.abs(w)) == pytest.approx(0.25, abs=1e-10)


@pytest.mark.parametrize("boundary", ["open", "periodic"])
def test_hamiltonian_anticommutes_with_chiral_operator(boundary):
    lat = BilayerLattice(6, 8, eta=-1.0, G=0.25, boundary=boundary)
    dis = DisorderRealization.generate(lat, seed=7, W_intra=0.25, W_inter=0.0625)
    H = build_realspace_hamiltonian(lat, dis)
    lam = np.diag(chiral_operator(lat))
    assert np.max(np.abs(lam @ H.toarray() @ lam + H.toarray())) < 1e-12
    assert abs(H - H.T).max() == 0


def test_onsite_disorder_breaks_chirality():
    lat = BilayerLattice(6, 6, eta=-1.0, G=0.25)
    dis = DisorderRealization.generate(lat, seed=7, W_intra=0.0, W_inter=0.0, W_onsite=0.25)
    H = build_realspace_hamiltonian(lat, dis).toarray()
    lam = np.diag(chiral_operator(lat))
    assert np.max(np.abs(lam @ H @ lam + H)) > 1e-3


def test_disorder_is_reproducible_and_bounded():
    lat = BilayerLattice(9, 7, eta=-1.0, G=0.25)
    a = DisorderRealization.generate(lat, seed=123, W_intra=0.25, W_inter=0.0625)
    b = DisorderRealization.generate(lat, seed=123, W_intra=0.25, W_inter=0.0625)
    c = DisorderRealization.generate(lat, seed=124, W_intra=0.25, W_inter=0.0625)
    np.testing.assert_array_equal(a.eps1, b.eps1)
    np.testing.assert_array_equal(a.eps3, b.eps3)
    assert not np.array_equal(a.eps1, c.eps1)
    assert np.all(np.abs(a.eps1) <= 0.25)
    assert np.all(np.abs(a.eps2) <= 0.25)
    assert np.all(np.abs(a.eps3) <= 0.0625)
    assert a.off_diagonal_only


def test_disorder_shape_mismatch():
    small = BilayerLattice(5, 5)
    dis = DisorderRealization.generate(small, seed=1, W_intra=0.1, W_inter=0.1)
    with pytest.raises(ConfigError):
        build_realspace_hamiltonian(BilayerLattice(6, 5), dis)


def test_lattice_validation():
    with pytest.raises(ConfigError):
        BilayerLattice(2, 5)
    with pytest.raises(ConfigError):
        BilayerLattice(5, 5, G=-0.1)
    with pytest.raises(ConfigError):
        BilayerLattice(5, 5, boundary="twisted")
    lat = BilayerLattice.from_dict({"Lx": 7, "Ly": 5, "eta": -1.0, "G": 0.25, "boundary": "periodic"})
    assert lat.dim == 70
    assert BilayerLattice.from_dict(lat.to_dict()) == lat


def test_dos_gap_and_edge_peaks():
    lat = BilayerLattice(5, 5, eta=-1.0, G=0.25)
    centers, dos = density_of_states(lat, 512, 200)
    width = centers[1] - centers[0]
    assert np.sum(dos) * width == pytest.approx(1.0)
    inside = np.abs(centers) < 0.25 - width
    assert np.all(dos[inside] == 0)
    top_two = set(np.argsort(dos)[-2:])
    near_edges = {int(np.argmin(np.abs(centers - 0.25 - width / 2))), int(np.argmin(np.abs(centers + 0.25 + width / 2)))}
    assert top_two == near_edges


def test_dos_general_eta_peaks_at_inner_edges():
    lat = BilayerLattice(5, 5, eta=-4.0, G=1.0)
    centers, dos = density_of_states(lat, 256, 120)
    gap = gap_halfwidth(lat)
    width = centers[1] - centers[0]
    assert np.all(dos[np.abs(centers) < gap - width] == 0)
    peak = centers[np.argmax(dos)]
    assert abs(abs(peak) - gap) < 3 * width


def test_dos_rejects_coarse_grids():
    lat = BilayerLattice(5, 5)
    with pytest.raises(ConfigError):
        density_of_states(lat, 16, 50)
    with pytest.raises(ConfigError):
        density_of_states(lat, 64, 8)


def test_thermal_occupation():
    assert thermal_occupation(1.0, 1.0, 0.3) == pytest.approx(0.5)
    assert thermal_occupation(0.2 * np.log(9), 0.0, 0.2) == pytest.approx(0.1)
    assert thermal_occupation(10.0, 0.0, 1.0) == pytest.approx(4.5398e-5, rel=1e-4)
    assert thermal_occupation(-1.0, 0.0, 0.0) == 1.0
    assert thermal_occupation(0.0, 0.0, 0.0) == 0.5
    assert thermal_occupation(1.0, 0.0, 0.0) == 0.0
    with pytest.raises(ConfigError):
        thermal_occupation(0.0, 0.0, -1.0)
