"""
Markovian spin model mediated by the bath's zero-energy bound states.

Emitters at Delta = 0 exchange excitations through the bound-state profile
of a single reference emitter: g_ij = g C_{n_ij, a1} / C_e for two layer-1
emitters, minus that for two layer-2 emitters, and g C_{n_ij, a2} / C_e
across layers. With C_n = g C_e u(n) this is g^2 times the unit profile.
"""
import json
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from src.emitters.bound_state import DEFAULT_NK, unit_profile
from src.errors import ConfigError, MarkovianWarning, ResolutionError

logger = logging.getLogger(__name__)

COUPLING_CUTOFF = 10
MARKOV_RATIO = 0.2
IMAGE_TOLERANCE = 1e-3


@dataclass(frozen=True, eq=False)
class SpinArray:
    """
    Emitters at absolute lattice sites, all at Delta = 0.

    sites holds (layer, n_x, n_y); cells optionally holds the (i, j) array
    index of each emitter for geometries built on a superlattice.
    """

    sites: tuple
    tag: str = "custom"
    cells: tuple = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        sites = tuple((int(l), int(x), int(y)) for l, x, y in self.sites)
        if len(set(sites)) != len(sites):
            raise ConfigError("spin array has repeated (layer, site) entries")
        for layer, _, _ in sites:
            if layer not in (1, 2):
                raise ConfigError(f"emitter layer must be 1 or 2, got {layer}")
        object.__setattr__(self, "sites", sites)
        if self.cells is not None and len(self.cells) != len(sites):
            raise ConfigError("cells and sites differ in length")

    def __len__(self):
        return len(self.sites)

    def layers(self):
        return np.array([s[0] for s in self.sites])

    def positions(self):
        return np.array([(s[1], s[2]) for s in self.sites])

    def check_fits(self, lat):
        for layer, x, y in self.sites:
            if not (0 <= x < lat.L_x and 0 <= y < lat.L_y):
                raise ConfigError(f"emitter at ({x}, {y}) lies outside the {lat.L_x}x{lat.L_y} lattice")

    def to_json(self):
        out = []
        for k, (layer, x, y) in enumerate(self.sites):
            entry = {"layer": layer, "nx": x, "ny": y}
            if self.cells is not None:
                entry["i"], entry["j"] = self.cells[k]
            out.append(entry)
        return out


def load_spin_array(source, tag="custom"):
    """SpinArray from a JSON path or an already-parsed list of {"layer", "nx", "ny"}."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "r") as f:
            data = json.load(f)
    else:
        data = source
    if isinstance(data, dict):
        tag = data.get("tag", tag)
        data = data["emitters"]
    try:
        sites = tuple((e["layer"], e["nx"], e["ny"]) for e in data)
        cells = tuple((e["i"], e["j"]) for e in data) if all("i" in e and "j" in e for e in data) else None
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed spin geometry: {exc}") from None
    return SpinArray(sites, tag=tag, cells=cells)


def half_filled_array(lat, size):
    """
    One emitter per layer on every even-sum site of a centred size x size patch.

    Emitters in one layer never interact (even separations); layer-1 and
    layer-2 emitters do, so the model is bipartite in layer space.
    """
    x0 = lat.center()[0] - size // 2
    y0 = lat.center()[1] - size // 2
    # keep the patch origin on an even-sum site
    if (x0 + y0) % 2:
        x0 += 1
    sites = []
    for layer in (1, 2):
        for j in range(size):
            for i in range(size):
                if (i + j) % 2 == 0:
                    sites.append((layer, x0 + i, y0 + j))
    array = SpinArray(tuple(sites), tag="bipartite-half-filled", meta={"size": size})
    array.check_fits(lat)
    return array


def dimer_coordinate(i, intra, inter):
    return (intra + inter) * (i // 2) + intra * (i % 2)


def ssh_dimerized_array(lat, n_cells=6, intra=4, inter=2):
    """
    2 n_cells x 2 n_cells emitters on a dimerized superlattice.

    Emitter (i, j) sits at (X(i), X(j)) with X(i) = (intra + inter)(i // 2) + intra (i % 2)
    and on layer 1 when i + j is even, layer 2 otherwise. intra > inter is the
    topological arrangement; swapping the two gives the trivial one.
    """
    if intra % 2 or inter % 2:
        raise ConfigError("dimer spacings must be even so all emitters share one chiral sublattice")
    n = 2 * n_cells
    span = dimer_coordinate(n - 1, intra, inter)
    x0 = max(0, (lat.L_x - 1 - span) // 2)
    y0 = max(0, (lat.L_y - 1 - span) // 2)
    # an even shift in both directions keeps every emitter on even-sum sites
    x0 -= x0 % 2
    y0 -= y0 % 2
    sites, cells = [], []
    for j in range(n):
        for i in range(n):
            layer = 1 if (i + j) % 2 == 0 else 2
            sites.append((layer, x0 + dimer_coordinate(i, intra, inter), y0 + dimer_coordinate(j, intra, inter)))
            cells.append((i, j))
    array = SpinArray(
        tuple(sites),
        tag="ssh-dimerized",
        cells=tuple(cells),
        meta={"n_cells": n_cells, "intra": intra, "inter": inter},
    )
    array.check_fits(lat)
    return array


def _reference(lat, n_k, reach):
    """Unit-coupling layer-1 profile at E = 0, checked for the needed reach."""
    half = n_k // 2
    if reach >= half:
        raise ResolutionError(
            f"coupling reach {reach} does not fit in the n_k={n_k} profile box", reach=reach, n_k=n_k
        )
    u1, u2 = unit_profile(lat, 0.0, 1, n_k)
    peak = max(np.max(np.abs(u1)), np.max(np.abs(u2)))
    # the periodic box folds in images of the profile from distance n_k - reach
    image = max(np.max(np.abs(u1[0])), np.max(np.abs(u2[0])), np.max(np.abs(u1[:, 0])), np.max(np.abs(u2[:, 0])))
    if image > IMAGE_TOLERANCE * peak:
        raise ResolutionError(
            f"bound-state profile not resolved on n_k={n_k}: edge/peak = {image / peak:.2e}", n_k=n_k
        )
    return u1.real, u2.real, half


def pair_coupling(u1, u2, half, layer_i, layer_j, dx, dy, g):
    if max(abs(dx), abs(dy)) > COUPLING_CUTOFF:
        return 0.0
    if layer_i != layer_j:
        return g**2 * u2[half + dy, half + dx]
    sign = 1.0 if layer_i == 1 else -1.0
    return sign * g**2 * u1[half + dy, half + dx]


def effective_couplings(array, lat, g, n_k=DEFAULT_NK):
    """Hermitian g_ij over the array, truncated at |n_ij|_inf <= COUPLING_CUTOFF."""
    if g > MARKOV_RATIO * lat.G:
        warnings.warn(
            f"g = {g} exceeds {MARKOV_RATIO} G = {MARKOV_RATIO * lat.G}; couplings assume the Markovian regime",
            MarkovianWarning,
            stacklevel=2,
        )
    pos = array.positions()
    layers = array.layers()
    diffs = pos[None, :, :] - pos[:, None, :]
    reach = int(min(COUPLING_CUTOFF, np.max(np.abs(diffs)) if len(array) > 1 else 0))
    u1, u2, half = _reference(lat, n_k, reach)

    n = len(array)
    M = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dx, dy = diffs[i, j]
            value = pair_coupling(u1, u2, half, layers[i], layers[j], dx, dy, g)
            M[i, j] = value
            M[j, i] = value
    logger.info("spin couplings: %d emitters, max |g_ij| = %.3e", n, np.max(np.abs(M)) if n > 1 else 0.0)
    return M


def parity_violation(array, couplings):
    """Largest |g_ij| on a pair the parity rule says must vanish."""
    pos = array.positions()
    layers = array.layers()
    worst = 0.0
    for i in range(len(array)):
        for j in range(len(array)):
            if i == j:
                continue
            s = int(np.sum(pos[j] - pos[i])) % 2
            forbidden = (s == 0) if layers[i] == layers[j] else (s == 1)
            if forbidden:
                worst = max(worst, abs(couplings[i, j]))
    return worst


def cross_layer_table(lat, g, n_k=DEFAULT_NK, radius=5):
    """{(n_x, n_y): J_12^n} for the half-filled model, |n|_inf <= radius, even-sum n only."""
    u1, u2, half = _reference(lat, n_k, radius)
    table = {}
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if (dx + dy) % 2 == 0:
                table[(dx, dy)] = float(g**2 * u2[half + dy, half + dx])
    return table


def bloch_f_S(table, k):
    """f_S(k) = sum_n J_12^n exp(-i k.n)."""
    total = 0j
    for (dx, dy), value in table.items():
        total += value * np.exp(-1j * (k.k_x * dx + k.k_y * dy))
    return complex(total)


def bipartite_bloch(table, k):
    f = bloch_f_S(table, k)
    return np.array([[0, f], [np.conj(f), 0]], dtype=complex)
