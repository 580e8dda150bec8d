import json

import numpy as np
import pytest

from src.errors import ConfigError, MarkovianWarning, ResolutionError
from src.lattice import BilayerLattice, KPoint
from src.spins import (
    SpinArray,
    bipartite_bloch,
    bloch_f_S,
    cross_layer_table,
    effective_couplings,
    half_filled_array,
    load_spin_array,
    parity_violation,
    ssh_dimerized_array,
)

pytestmark = pytest.mark.filterwarnings("ignore::src.errors.MarkovianWarning")

LAT = BilayerLattice(21, 21, eta=-1.0, G=0.25)


def _pair(a, b, lat=LAT, g=0.1):
    return effective_couplings(SpinArray((a, b)), lat, g)[0, 1]


def test_parity_selection_examples():
    assert abs(_pair((1, 5, 5), (1, 6, 6))) < 1e-10
    assert abs(_pair((1, 5, 5), (2, 6, 5))) < 1e-10
    assert abs(_pair((2, 5, 5), (2, 7, 5))) < 1e-10
    assert abs(_pair((1, 5, 5), (1, 6, 5))) > 1e-6


def test_parity_zeros_on_random_pairs():
    rng = np.random.default_rng(11)
    values, forbidden = [], []
    while len(values) < 200:
        li, lj = rng.integers(1, 3, size=2)
        x, y = rng.integers(0, 21, size=2)
        dx, dy = rng.integers(-10, 11, size=2)
        if li == lj and dx == 0 and dy == 0:
            continue
        values.append(abs(_pair((int(li), int(x), int(y)), (int(lj), int(x + dx), int(y + dy)))))
        odd = (dx + dy) % 2 == 1
        # same layer couples only odd separations, opposite layers only even ones
        forbidden.append(not odd if li == lj else odd)
    values = np.array(values)
    forbidden = np.array(forbidden)
    assert forbidden.any() and (~forbidden).any()
    assert np.max(values[forbidden]) < 1e-10 * np.max(values)


def test_cross_layer_onsite_coupling_is_negative():
    value = _pair((1, 5, 5), (2, 5, 5))
    assert value < 0


def test_layer_two_pairs_flip_sign():
    one = _pair((1, 5, 5), (1, 6, 5))
    two = _pair((2, 5, 5), (2, 6, 5))
    assert two == pytest.approx(-one, rel=1e-12)


def test_couplings_truncated_beyond_cutoff():
    assert _pair((1, 0, 0), (2, 11, 1), lat=BilayerLattice(21, 21, eta=-1.0, G=1.0)) == 0.0
    assert _pair((1, 0, 0), (2, 10, 0), lat=BilayerLattice(21, 21, eta=-1.0, G=1.0)) != 0.0


def test_markovian_warning():
    with pytest.warns(MarkovianWarning):
        effective_couplings(SpinArray(((1, 5, 5), (2, 5, 5))), LAT, 0.1)


def test_resolution_errors():
    lat = BilayerLattice(21, 21, eta=-1.0, G=0.1)
    array = SpinArray(((1, 5, 5), (1, 6, 5)))
    with pytest.raises(ResolutionError):
        effective_couplings(array, lat, 0.01, n_k=64)
    with pytest.raises(ResolutionError):
        effective_couplings(SpinArray(((1, 0, 0), (1, 11, 0))), LAT, 0.01, n_k=16)


def test_half_filled_model_is_chiral():
    array = half_filled_array(LAT, 8)
    assert len(array) == 64
    M = effective_couplings(array, LAT, 0.05)
    np.testing.assert_array_equal(M, M.T)
    assert np.all(np.diag(M) == 0)
    assert parity_violation(array, M) < 1e-10
    w = np.linalg.eigvalsh(M)
    np.testing.assert_allclose(np.sort(w), -np.sort(w)[::-1], atol=1e-10)


def test_dimerized_array_geometry():
    lat = BilayerLattice(35, 35, eta=-1.0, G=4.0)
    top = ssh_dimerized_array(lat, 6, intra=4, inter=2)
    assert len(top) == 144
    xs = sorted({s[1] for s in top.sites})
    assert xs[0] == 0 and xs[-1] == 34
    assert np.diff(xs)[:4].tolist() == [4, 2, 4, 2]
    assert all((x + y) % 2 == 0 for _, x, y in top.sites)
    assert {s[0] for s, c in zip(top.sites, top.cells) if sum(c) % 2 == 0} == {1}
    with pytest.raises(ConfigError):
        ssh_dimerized_array(lat, 6, intra=3, inter=3)
    with pytest.raises(ConfigError):
        ssh_dimerized_array(BilayerLattice(21, 21), 6, intra=4, inter=2)


def test_spin_array_json_roundtrip(tmp_path):
    lat = BilayerLattice(35, 35, eta=-1.0, G=4.0)
    array = ssh_dimerized_array(lat, 2, intra=4, inter=2)
    path = tmp_path / "geometry.json"
    path.write_text(json.dumps(array.to_json()))
    loaded = load_spin_array(path, tag="ssh-dimerized")
    assert loaded.sites == array.sites
    assert loaded.cells == array.cells


def test_spin_array_validation():
    with pytest.raises(ConfigError):
        SpinArray(((1, 0, 0), (1, 0, 0)))
    with pytest.raises(ConfigError):
        SpinArray(((3, 0, 0),))
    with pytest.raises(ConfigError):
        load_spin_array([{"layer": 1, "nx": 0}])


def test_f_S_simple_tables():
    k = KPoint(0.4, -1.3)
    assert bloch_f_S({(0, 0): 0.7}, k) == pytest.approx(0.7)
    value = bloch_f_S({(1, 1): 0.5, (-1, -1): 0.5}, k)
    assert value == pytest.approx(np.cos(k.k_x + k.k_y))


def test_bipartite_bloch_spectrum():
    table = cross_layer_table(LAT, 0.05, n_k=128, radius=5)
    assert all((dx + dy) % 2 == 0 for dx, dy in table)
    for k in (KPoint(0.3, 0.1), KPoint(-2.0, 1.0)):
        H = bipartite_bloch(table, k)
        np.testing.assert_allclose(H, H.conj().T)
        w = np.linalg.eigvalsh(H)
        f = abs(bloch_f_S(table, k))
        np.testing.assert_allclose(w, [-f, f], atol=1e-15)
