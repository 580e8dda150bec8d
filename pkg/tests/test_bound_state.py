import json

import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from src.emitters import (
    BoundStateSolution,
    EmitterConfig,
    bs_exact_diagonalization,
    bs_momentum_amplitudes,
    bs_realspace_profile,
    parity_norms,
    self_energy,
    solve_pole,
    zero_mode_ensemble,
)
from src.emitters.bound_state import momentum_resolvent
from src.emitters.emitter import CouplingPoint
from src.errors import (
    ConfigError,
    HybridizationFailureError,
    NoBoundStateError,
    PrincipalValueError,
    ResolutionWarning,
)
from src.lattice import BilayerLattice, DisorderRealization, KPoint, build_realspace_hamiltonian

pytestmark = pytest.mark.filterwarnings("ignore::src.errors.ResolutionWarning")

LAT = BilayerLattice(5, 5, eta=-1.0, G=0.25)


def test_momentum_amplitudes_examples():
    a1, a2 = bs_momentum_amplitudes(KPoint(np.pi / 2, np.pi / 2), 0.0, LAT)
    assert a1 == pytest.approx(0.0, abs=1e-12)
    assert a2 == pytest.approx(-4.0)
    a1, a2 = bs_momentum_amplitudes(KPoint(0, 0), 0.0, LAT)
    assert a1 == pytest.approx(-4 / 16.0625)
    assert a2 == pytest.approx(-0.25 / 16.0625)


def test_momentum_amplitudes_parity_under_pi_shift():
    for k in (KPoint(0.3, -1.1), KPoint(2.0, 0.4)):
        a1, a2 = bs_momentum_amplitudes(k, 0.0, LAT)
        b1, b2 = bs_momentum_amplitudes(k.shifted(), 0.0, LAT)
        assert b1 == pytest.approx(-a1, abs=1e-12)
        assert b2 == pytest.approx(a2, abs=1e-12)


def test_angle_form_agrees_with_resolvent():
    lat = BilayerLattice(5, 5, eta=-4.0, G=1.0)
    for k in (KPoint(0.3, -1.1), KPoint(2.0, 0.4), KPoint(0, 0)):
        a1, a2 = bs_momentum_amplitudes(k, 0.3, lat)
        r1, r2 = momentum_resolvent(k.k_x, k.k_y, 0.3, lat, layer=1)
        assert a1 == pytest.approx(r1, rel=1e-12)
        assert a2 == pytest.approx(r2, rel=1e-12)


def test_amplitudes_outside_gap_rejected():
    with pytest.raises(PrincipalValueError):
        bs_momentum_amplitudes(KPoint(0, 0), 0.3, LAT)


def test_self_energy_symmetries():
    assert self_energy(0.0, LAT, g=0.1) == pytest.approx(0.0, abs=1e-15)
    assert self_energy(0.1, LAT, g=0.1) == pytest.approx(-self_energy(-0.1, LAT, g=0.1), abs=1e-14)
    assert self_energy(0.1, LAT, layer=2, g=0.1) == pytest.approx(self_energy(0.1, LAT, layer=1, g=0.1), rel=1e-10)
    with pytest.raises(PrincipalValueError):
        self_energy(0.25, LAT)


def test_self_energy_matches_periodic_lattice_resolvent():
    lat = BilayerLattice(64, 64, eta=-4.0, G=1.0, boundary="periodic")
    z, g = 0.3, 0.1
    H = build_realspace_hamiltonian(lat)
    e = np.zeros(lat.dim)
    site = lat.index(1, 0, 0)
    e[site] = 1.0
    column = spla.spsolve((z * sp.identity(lat.dim) - H).tocsc(), e)
    exact = g**2 * column[site]
    with pytest.warns(ResolutionWarning):
        value = self_energy(z, lat, layer=1, g=g, n_k=64)
    assert value == pytest.approx(exact, rel=1e-9)
    assert abs(value) > 1e-6


def test_solve_pole_resonant_and_markovian():
    assert solve_pole(EmitterConfig.small(delta=0.0, g=0.1), LAT) == 0.0
    E = solve_pole(EmitterConfig.small(delta=0.05, g=0.01), LAT)
    assert abs(E - 0.05) < 1e-4


def test_solve_pole_residual():
    em = EmitterConfig.small(delta=0.1, g=0.1)
    E = solve_pole(em, LAT, n_k=128)
    assert abs(E) < 0.25
    assert abs(E - 0.1 - self_energy(E, LAT, g=0.1, n_k=128)) < 1e-10


def test_solve_pole_errors():
    with pytest.raises(NoBoundStateError):
        solve_pole(EmitterConfig.small(delta=0.3, g=0.1), LAT)
    giant = EmitterConfig(0.0, (CouplingPoint(1, 0, 0, 0.1), CouplingPoint(1, 1, 1, 0.1)))
    with pytest.raises(ConfigError):
        solve_pole(giant, LAT)


def test_resonant_profile_parity_and_phases():
    sol = bs_realspace_profile(EmitterConfig.small(delta=0.0, g=0.1), LAT, n_k=128)
    dx, dy = sol.offsets()
    even = (dx + dy) % 2 == 0
    assert np.max(np.abs(sol.field_a1[even])) < 1e-12
    assert np.max(np.abs(sol.field_a2[~even])) < 1e-12
    assert np.max(np.abs(sol.field_a1.imag)) < 1e-12
    assert np.max(np.abs(sol.field_a2.imag)) < 1e-12
    assert sol.c_e**2 + sol.photonic_norm() == pytest.approx(1.0, abs=1e-10)
    assert sol.method == "quadrature"
    signs = [np.sign(sol.amplitude(1, m + 1, m).real) for m in range(4)]
    assert all(signs[i] == -signs[i + 1] for i in range(3))


def test_resonant_profile_is_anisotropic():
    sol = bs_realspace_profile(EmitterConfig.small(delta=0.0, g=0.1), LAT, n_k=128)
    assert abs(sol.amplitude(1, 7, 6)) > abs(sol.amplitude(1, 9, 0))
    assert abs(sol.amplitude(1, 7, 6)) > abs(sol.amplitude(1, 0, 9))
    assert abs(sol.amplitude(2, 6, 6)) > abs(sol.amplitude(2, 8, 0))
    assert abs(sol.amplitude(2, -6, 6)) > abs(sol.amplitude(2, 0, -8))


def test_profile_norm_converges_with_grid():
    em = EmitterConfig.small(delta=0.0, g=0.1)
    coarse = bs_realspace_profile(em, LAT, n_k=256)
    fine = bs_realspace_profile(em, LAT, n_k=512)
    assert abs(fine.c_e - coarse.c_e) / fine.c_e < 1e-4


def test_profile_grid_checks():
    em = EmitterConfig.small(delta=0.0, g=0.1)
    with pytest.raises(ConfigError):
        bs_realspace_profile(em, LAT, n_k=100)
    with pytest.raises(ConfigError):
        bs_realspace_profile(em, LAT, n_k=32)


@pytest.mark.filterwarnings("default::src.errors.ResolutionWarning")
def test_profile_warns_when_box_too_small():
    with pytest.warns(ResolutionWarning):
        bs_realspace_profile(EmitterConfig.small(delta=0.0, g=0.1), LAT, n_k=64)


def test_layer_two_emitter_mirrors_layer_one():
    one = bs_realspace_profile(EmitterConfig.small(delta=0.0, g=0.1, layer=1), LAT, n_k=128)
    two = bs_realspace_profile(EmitterConfig.small(delta=0.0, g=0.1, layer=2), LAT, n_k=128)
    np.testing.assert_allclose(two.field_a1, one.field_a2, atol=1e-14)
    np.testing.assert_allclose(two.field_a2, -one.field_a1, atol=1e-14)


def test_exact_diagonalization_zero_mode():
    lat = BilayerLattice(41, 41, eta=-1.0, G=0.25, boundary="open")
    sol = bs_exact_diagonalization(EmitterConfig.small(delta=0.0, g=0.1), lat)
    assert abs(sol.energy) < 1e-8
    assert sol.c_e**2 + sol.photonic_norm() == pytest.approx(1.0, abs=1e-10)
    assert sol.c_e**2 > 0.9
    odd, even = parity_norms(sol)
    assert even < 1e-16
    assert odd > 0
    assert sol.method == "exact_diag"


@pytest.mark.parametrize(
    "lat, n_k, rel",
    [
        (BilayerLattice(31, 31, eta=-1.0, G=1.0, boundary="open"), 64, 1e-6),
        # the G = J/4 state is wide; the box must hold many localization lengths
        (BilayerLattice(81, 81, eta=-1.0, G=0.25, boundary="open"), 256, 1e-4),
    ],
)
def test_exact_diagonalization_matches_quadrature(lat, n_k, rel):
    em = EmitterConfig.small(delta=0.0, g=0.1)
    exact = bs_exact_diagonalization(em, lat)
    quad = bs_realspace_profile(em, lat.with_(boundary="periodic"), n_k=n_k)
    assert exact.c_e == pytest.approx(quad.c_e, rel=rel)
    for layer in (1, 2):
        w_exact = exact.window(layer, 5)
        w_quad = quad.window(layer, 5)
        scale = np.max(np.abs(w_quad))
        assert np.max(np.abs(w_exact - w_quad)) / scale < 1e-3


def test_hybridization_failure_for_strong_coupling():
    lat = BilayerLattice(11, 11, eta=-1.0, G=0.25)
    with pytest.raises(HybridizationFailureError) as info:
        bs_exact_diagonalization(EmitterConfig.small(delta=0.0, g=4.0), lat)
    assert info.value.reason == "hybridization_failure"


def test_zero_mode_survives_off_diagonal_disorder():
    lat = BilayerLattice(11, 11, eta=-1.0, G=0.25)
    runs = zero_mode_ensemble(EmitterConfig.small(delta=0.0, g=0.1), lat, range(50), W_intra=0.25, W_inter=0.0625)
    assert [r["seed"] for r in runs] == list(range(50))
    for r in runs:
        assert r["min_abs_E"] < 1e-10
        assert r["coupled_norm"] < 1e-8


def test_onsite_disorder_destroys_zero_mode():
    lat = BilayerLattice(11, 11, eta=-1.0, G=0.25)
    runs = zero_mode_ensemble(
        EmitterConfig.small(delta=0.0, g=0.1), lat, range(50), W_intra=0.25, W_inter=0.0625, W_onsite=0.25
    )
    broken = [r for r in runs if r["min_abs_E"] > 1e-4]
    assert len(broken) >= 45


def test_disordered_exact_solution_keeps_parity():
    lat = BilayerLattice(15, 15, eta=-1.0, G=0.25)
    dis = DisorderRealization.generate(lat, seed=3, W_intra=0.25, W_inter=0.0625)
    sol = bs_exact_diagonalization(EmitterConfig.small(delta=0.0, g=0.1), lat, dis)
    odd, even = parity_norms(sol)
    assert abs(sol.energy) < 1e-10
    assert even < 1e-16
    assert sol.params["disorder"]["seed"] == 3


def test_general_eta_bound_state_has_both_parities():
    lat = BilayerLattice(5, 5, eta=-4.0, G=1.0)
    sol = bs_realspace_profile(EmitterConfig.small(delta=0.5, g=0.3), lat, n_k=64)
    odd, even = parity_norms(sol)
    total = odd + even
    assert odd / total > 1e-4
    assert even / total > 1e-4
    assert abs(sol.energy) < 0.8


def test_parity_norms_of_zero_field():
    zero = np.zeros((5, 5), dtype=complex)
    sol = BoundStateSolution(0.0, 1.0, zero, zero.copy(), "quadrature", (2, 2))
    assert parity_norms(sol) == (0.0, 0.0)


def test_field_dump_rows_and_sidecar():
    sol = bs_realspace_profile(EmitterConfig.small(delta=0.0, g=0.1), LAT, n_k=64)
    rows = list(sol.rows())
    assert len(rows) == 2 * 64 * 64
    assert rows[0][:3] == (1, -32, -32)
    assert rows[-1][:3] == (2, 31, 31)
    meta = json.loads(sol.sidecar_json())
    assert meta["method"] == "quadrature"
    assert meta["params"]["n_k"] == 64
