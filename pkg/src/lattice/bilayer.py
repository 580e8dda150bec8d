"""
Real-space bilayer square lattice: geometry, disorder realizations and the
sparse single-particle Hamiltonian.

Sites are indexed row-major as (layer, n_y, n_x) with the layer slowest, so a
flat vector of length 2*L_x*L_y reshapes to (2, L_y, L_x).
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import scipy.sparse as sp

from src.errors import ConfigError

logger = logging.getLogger(__name__)

# Philox key layout: low 64 bits hold the seed, high bits the stream id.
_SEED_MASK = (1 << 64) - 1
STREAM_EPS1 = 1
STREAM_EPS2 = 2
STREAM_EPS3 = 3
STREAM_ONSITE = 4


class Boundary(str, Enum):
    PERIODIC = "periodic"
    OPEN = "open"


@dataclass(frozen=True)
class BilayerLattice:
    """Two stacked L_x x L_y square lattices with hoppings J, eta*J and vertical coupling G."""

    L_x: int
    L_y: int
    J: float = 1.0
    eta: float = -1.0
    G: float = 0.25
    boundary: Boundary = Boundary.OPEN

    def __post_init__(self):
        if self.L_x < 3 or self.L_y < 3:
            raise ConfigError(f"lattice must be at least 3x3, got {self.L_x}x{self.L_y}")
        if self.G < 0:
            raise ConfigError(f"interlayer coupling G must be >= 0, got {self.G}")
        try:
            object.__setattr__(self, "boundary", Boundary(self.boundary))
        except ValueError:
            raise ConfigError(f"unknown boundary '{self.boundary}'") from None

    @property
    def n_sites(self):
        return self.L_x * self.L_y

    @property
    def dim(self):
        return 2 * self.n_sites

    @property
    def periodic(self):
        return self.boundary is Boundary.PERIODIC

    def center(self):
        """Site (n_x, n_y) used to host a single emitter."""
        return (self.L_x // 2, self.L_y // 2)

    def index(self, layer, n_x, n_y):
        if layer not in (1, 2):
            raise ConfigError(f"layer must be 1 or 2, got {layer}")
        if not (0 <= n_x < self.L_x and 0 <= n_y < self.L_y):
            raise ConfigError(f"site ({n_x}, {n_y}) outside {self.L_x}x{self.L_y} lattice")
        return (layer - 1) * self.n_sites + n_y * self.L_x + n_x

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return {
            "Lx": self.L_x,
            "Ly": self.L_y,
            "J": self.J,
            "eta": self.eta,
            "G": self.G,
            "boundary": self.boundary.value,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            L_x=int(data["Lx"]),
            L_y=int(data["Ly"]),
            J=float(data.get("J", 1.0)),
            eta=float(data["eta"]),
            G=float(data["G"]),
            boundary=data.get("boundary", "open"),
        )


def _stream(seed, stream):
    key = (stream << 64) | (int(seed) & _SEED_MASK)
    return np.random.Generator(np.random.Philox(key=key))


def _uniform(seed, stream, width, shape):
    if width == 0:
        return np.zeros(shape)
    return _stream(seed, stream).uniform(-width, width, size=shape)


@dataclass(frozen=True, eq=False)
class DisorderRealization:
    """
    Random perturbations of the bath.

    eps1/eps2 have shape (2, L_y, L_x): entry [0, y, x] perturbs the bond
    (x, y)-(x+1, y) and entry [1, y, x] the bond (x, y)-(x, y+1). Bonds that
    leave an open lattice are drawn but never used. eps3 has shape (L_y, L_x)
    and perturbs the vertical bond at each site; onsite (2, L_y, L_x) holds
    diagonal energies and is zero unless W_onsite > 0.
    """

    eps1: np.ndarray
    eps2: np.ndarray
    eps3: np.ndarray
    seed: int
    W_intra: float
    W_inter: float
    W_onsite: float = 0.0
    onsite: np.ndarray = field(default=None)

    @classmethod
    def generate(cls, lat, seed, W_intra, W_inter, W_onsite=0.0):
        bond_shape = (2, lat.L_y, lat.L_x)
        site_shape = (lat.L_y, lat.L_x)
        return cls(
            eps1=_uniform(seed, STREAM_EPS1, W_intra, bond_shape),
            eps2=_uniform(seed, STREAM_EPS2, W_intra, bond_shape),
            eps3=_uniform(seed, STREAM_EPS3, W_inter, site_shape),
            seed=int(seed),
            W_intra=W_intra,
            W_inter=W_inter,
            W_onsite=W_onsite,
            onsite=_uniform(seed, STREAM_ONSITE, W_onsite, bond_shape),
        )

    @property
    def off_diagonal_only(self):
        return self.onsite is None or not np.any(self.onsite)

    def check_conforms(self, lat):
        bond_shape = (2, lat.L_y, lat.L_x)
        site_shape = (lat.L_y, lat.L_x)
        for name, arr, shape in (
            ("eps1", self.eps1, bond_shape),
            ("eps2", self.eps2, bond_shape),
            ("eps3", self.eps3, site_shape),
        ):
            if np.shape(arr) != shape:
                raise ConfigError(f"disorder map {name} has shape {np.shape(arr)}, lattice needs {shape}")
        if self.onsite is not None and np.shape(self.onsite) != bond_shape:
            raise ConfigError(f"onsite disorder has shape {np.shape(self.onsite)}, lattice needs {bond_shape}")

    def to_dict(self):
        return {"seed": self.seed, "W_intra": self.W_intra, "W_inter": self.W_inter, "W_onsite": self.W_onsite}


def _intralayer_bonds(lat):
    """Yields (direction, source, target) flat in-layer site indices for every bond."""
    ny, nx = np.meshgrid(np.arange(lat.L_y), np.arange(lat.L_x), indexing="ij")
    flat = ny * lat.L_x + nx
    if lat.periodic:
        keep_x = np.ones_like(flat, dtype=bool)
        keep_y = np.ones_like(flat, dtype=bool)
    else:
        keep_x = nx < lat.L_x - 1
        keep_y = ny < lat.L_y - 1
    target_x = ny * lat.L_x + (nx + 1) % lat.L_x
    target_y = ((ny + 1) % lat.L_y) * lat.L_x + nx
    yield 0, flat[keep_x], target_x[keep_x], keep_x
    yield 1, flat[keep_y], target_y[keep_y], keep_y


def build_realspace_hamiltonian(lat, dis=None):
    """Sparse Hermitian bath Hamiltonian of dimension 2*L_x*L_y (CSR, real)."""
    if dis is not None:
        dis.check_conforms(lat)
    n = lat.n_sites
    rows, cols, vals = [], [], []

    for direction, src, dst, keep in _intralayer_bonds(lat):
        t1 = np.full(src.shape, lat.J)
        t2 = np.full(src.shape, lat.eta * lat.J)
        if dis is not None:
            t1 = t1 + dis.eps1[direction][keep]
            t2 = t2 + dis.eps2[direction][keep]
        rows += [src, src + n]
        cols += [dst, dst + n]
        vals += [t1, t2]

    sites = np.arange(n)
    vertical = np.full(n, lat.G)
    if dis is not None:
        vertical = vertical + dis.eps3.ravel()
    rows.append(sites)
    cols.append(sites + n)
    vals.append(vertical)

    upper = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(lat.dim, lat.dim),
    ).tocsr()
    H = upper + upper.T
    if dis is not None and not dis.off_diagonal_only:
        H = H + sp.diags(dis.onsite.ravel())
    logger.debug("built bath Hamiltonian dim=%d nnz=%d", lat.dim, H.nnz)
    return H.tocsr()


def sublattice_sign(lat):
    """(-1)^(n_x+n_y) over the (L_y, L_x) grid."""
    ny, nx = np.meshgrid(np.arange(lat.L_y), np.arange(lat.L_x), indexing="ij")
    return np.where((nx + ny) % 2 == 0, 1.0, -1.0)


def chiral_operator(lat):
    """Diagonal of Lambda: +(-1)^(n_x+n_y) on layer 1, -(-1)^(n_x+n_y) on layer 2."""
    s = sublattice_sign(lat).ravel()
    return np.concatenate([s, -s])
