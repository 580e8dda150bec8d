import numpy as np
import pytest

from src.emitters import (
    CouplingPoint,
    EmitterConfig,
    bs_realspace_profile,
    branch_norm,
    giant_bs_profile,
    interference_factor,
    parity_norms,
    phase_profile,
    window_fraction,
)
from src.emitters.bound_state import unit_profile
from src.emitters.giant_atom import chirality_ratio, phase_jumps, preset
from src.errors import DecompositionError, ParityViolationError
from src.lattice import BilayerLattice, KPoint

pytestmark = pytest.mark.filterwarnings("ignore::src.errors.ResolutionWarning")

LAT = BilayerLattice(5, 5, eta=-1.0, G=0.25)


def _points(*sites, g=1.0, layer=1):
    return [CouplingPoint(layer, x, y, g) for x, y in sites]


def test_pair_factor_vanishes_on_band_edge_line():
    pts = _points((0, 0), (1, 1))
    for k_x in np.linspace(-3, 3, 7):
        assert abs(interference_factor(pts, KPoint(k_x, np.pi - k_x))) < 1e-14


def test_cross_factor_is_dispersion():
    pts = _points((1, 0), (-1, 0), (0, 1), (0, -1))
    for k in (KPoint(0.3, 1.2), KPoint(-2.0, 0.5), KPoint(np.pi / 2, np.pi / 2)):
        expected = 2 * (np.cos(k.k_x) + np.cos(k.k_y))
        assert interference_factor(pts, k) == pytest.approx(expected, abs=1e-14)


def test_signed_diagonal_factor():
    pts = list(preset("diagonal").points)
    for k in (KPoint(0.3, 1.2), KPoint(-2.0, 0.5)):
        assert interference_factor(pts, k) == pytest.approx(-4 * np.sin(k.k_x) * np.sin(k.k_y), abs=1e-13)
    assert abs(interference_factor(pts, KPoint(0, np.pi))) < 1e-14
    assert abs(interference_factor(pts, KPoint(-np.pi, 0))) < 1e-14


def test_superposition_is_linear():
    em = EmitterConfig(0.0, (CouplingPoint(1, 0, 0, 0.1), CouplingPoint(1, 1, 1, 0.1), CouplingPoint(2, 1, 0, -0.05)))
    sol = giant_bs_profile(em, LAT, n_k=128)
    a1 = np.zeros((128, 128), dtype=complex)
    a2 = np.zeros((128, 128), dtype=complex)
    for p in em.points:
        u1, u2 = unit_profile(LAT, 0.0, p.layer, 128)
        a1 += p.g * np.roll(u1, (p.n_y, p.n_x), axis=(0, 1))
        a2 += p.g * np.roll(u2, (p.n_y, p.n_x), axis=(0, 1))
    scale = 1 / np.sqrt(1 + np.sum(np.abs(a1) ** 2) + np.sum(np.abs(a2) ** 2))
    np.testing.assert_allclose(sol.field_a1, scale * a1, atol=1e-10)
    np.testing.assert_allclose(sol.field_a2, scale * a2, atol=1e-10)
    assert sol.c_e == pytest.approx(scale)


def test_single_point_giant_equals_small_atom():
    em = EmitterConfig.small(delta=0.0, g=0.1)
    giant = giant_bs_profile(em, LAT, n_k=128)
    small = bs_realspace_profile(em, LAT, n_k=128)
    np.testing.assert_allclose(giant.field_a1, small.field_a1, atol=1e-14)


def test_parity_violation_refused_unless_overridden():
    em = EmitterConfig(0.0, (CouplingPoint(1, 0, 0, 0.1), CouplingPoint(1, 1, 0, 0.1)))
    with pytest.raises(ParityViolationError):
        giant_bs_profile(em, LAT, n_k=64)
    sol = giant_bs_profile(em, LAT, n_k=64, allow_parity_violation=True)
    odd, even = parity_norms(sol)
    assert odd > 0 and even > 0


@pytest.mark.parametrize("name", ["pair", "cross", "diagonal", "chiral"])
def test_parity_preserved(name):
    sol = giant_bs_profile(preset(name, g=0.1), LAT, n_k=128)
    assert sol.energy == 0.0
    odd, even = parity_norms(sol)
    assert min(odd, even) < 1e-10 * max(odd, even)


def test_pair_suppresses_one_diagonal_branch():
    sol = giant_bs_profile(preset("pair", g=0.1), LAT, n_k=128)
    suppressed = branch_norm(sol, (1, 1))
    enhanced = branch_norm(sol, (1, -1))
    assert suppressed < 0.05 * enhanced


def test_suppression_grows_as_gap_closes():
    ratios = []
    for G in (0.125, 0.5):
        sol = giant_bs_profile(preset("pair", g=0.1), LAT.with_(G=G), n_k=256)
        ratios.append(branch_norm(sol, (1, 1)) / branch_norm(sol, (1, -1)))
    assert ratios[0] < ratios[1]


def test_cross_points_trap_the_photon():
    small = bs_realspace_profile(EmitterConfig.small(delta=0.0, g=0.1), LAT, n_k=256)
    cross = giant_bs_profile(preset("cross", g=0.1), LAT, n_k=256)
    assert window_fraction(cross, 3) < 0.5 * window_fraction(small, 3)
    # calibrated at G = J/4; stable from n_k = 256 on
    assert window_fraction(cross, 3) == pytest.approx(0.05578, rel=1e-3)


def test_diagonal_points_tail_fraction():
    diagonal = giant_bs_profile(preset("diagonal", g=0.1), LAT, n_k=256)
    assert window_fraction(diagonal, 4) == pytest.approx(0.3596, rel=1e-3)


def test_chiral_pair_phase_jump():
    sol = giant_bs_profile(preset("chiral", g=0.1), LAT, n_k=128)
    rows = phase_profile(sol, offset=1, span=12)
    assert len(rows) == 25
    assert all(r[2] in (0.0, np.pi) for r in rows)
    assert phase_jumps(rows) == [(1, 0)]
    assert chirality_ratio(rows) < 0.5


def test_phase_profile_needs_two_contributions():
    small = bs_realspace_profile(EmitterConfig.small(delta=0.0, g=0.1), LAT, n_k=64)
    with pytest.raises(DecompositionError):
        phase_profile(small)
    many = giant_bs_profile(preset("cross", g=0.1), LAT, n_k=64)
    with pytest.raises(DecompositionError):
        phase_profile(many)
