"""
Generalized 2D SSH description of the dimerized spin array.

Bloch basis order is (A1, A2, B1, B2) for the four emitters of a unit cell
at cell offsets (0,0), (1,1), (1,0), (0,1); A sites are on layer 1.
"""
import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from src.errors import (
    ConfigError,
    GaplessError,
    GaplessWarning,
    GeometryMismatchError,
    SymmetryBreakingWarning,
)
from src.lattice.bands import KPoint

logger = logging.getLogger(__name__)

BOND_SPREAD = 0.10
GAPLESS_RTOL = 1e-2
MIN_GAP = 1e-6
SNAP_TOL = 1e-3
CORNER_THRESHOLD = 0.6
EDGE_THRESHOLD = 0.6
ZERO_WINDOW = 1e-4
N_CORNERS = 4


@dataclass(frozen=True)
class SSHParams:
    t1: float
    t2: float
    t3: float = 0.0
    t4: float = 0.0

    def f0(self, k):
        """t1 + t2 e^{ik} + t3 e^{-ik} + t4 e^{2ik}."""
        return self.t1 + self.t2 * np.exp(1j * k) + self.t3 * np.exp(-1j * k) + self.t4 * np.exp(2j * k)

    def is_topological_order(self):
        return abs(self.t2) > abs(self.t1) > abs(self.t4) > abs(self.t3)

    def as_tuple(self):
        return (self.t1, self.t2, self.t3, self.t4)


def ssh_bloch(params, kbar):
    """[[0, F], [F^+, 0]] with F = [[f0(kx), f0(ky)], [f0*(ky), f0*(kx)]]."""
    fx = params.f0(kbar.k_x)
    fy = params.f0(kbar.k_y)
    F = np.array([[fx, fy], [np.conj(fy), np.conj(fx)]])
    H = np.zeros((4, 4), dtype=complex)
    H[:2, 2:] = F
    H[2:, :2] = F.conj().T
    return H


def _bond_classes(array):
    """Index pairs of the four fitted bond classes along rows of the array."""
    if array.cells is None:
        raise GeometryMismatchError("SSH fit needs an array with (i, j) cell indices")
    where = {cell: k for k, cell in enumerate(array.cells)}
    n = max(i for i, _ in array.cells) + 1
    classes = {"t1": [], "t2": [], "t3": [], "t4": []}
    for (i, j), a in where.items():
        for step, even_name, odd_name in ((1, "t1", "t2"), (3, "t3", "t4")):
            if i + step < n and (i + step, j) in where:
                classes[even_name if i % 2 == 0 else odd_name].append((a, where[(i + step, j)]))
    return classes


def fit_ssh_params(couplings, array):
    """
    Read t1..t4 off the coupling matrix.

    t1 is the intra-dimer bond, t2 the nearest inter-dimer bond, t3 and t4
    the two next bonds along a row. Each class is averaged over the array.
    """
    values = {}
    for name, pairs in _bond_classes(array).items():
        if not pairs:
            raise GeometryMismatchError(f"no bonds of class {name} in the array")
        g = np.array([couplings[a, b] for a, b in pairs])
        mean = float(np.mean(g))
        spread = float(np.max(g) - np.min(g))
        scale = max(abs(mean), np.max(np.abs(g)))
        if scale > 0 and spread > BOND_SPREAD * scale:
            raise GeometryMismatchError(
                f"bond class {name} is inconsistent: spread {spread:.3e} vs mean {mean:.3e}", bond=name
            )
        values[name] = mean
    params = SSHParams(values["t1"], values["t2"], values["t3"], values["t4"])
    if np.isclose(abs(params.t1), abs(params.t2), rtol=GAPLESS_RTOL):
        warnings.warn(f"|t1| = |t2| = {abs(params.t1):.3e}: the SSH chain is gapless", GaplessWarning, stacklevel=2)
    logger.info("fitted SSH hoppings t1=%.3e t2=%.3e t3=%.3e t4=%.3e", *params.as_tuple())
    return params


def ssh_finite_couplings(params, n_cells, periodic=False):
    """
    Hopping matrix of the 2 n_cells x 2 n_cells SSH array truncated at t1..t4.

    Row-major over (i, j) with i fastest, matching ssh_dimerized_array.
    """
    if n_cells < 2:
        raise ConfigError(f"SSH array needs at least 2 cells per side, got {n_cells}")
    n = 2 * n_cells
    M = np.zeros((n * n, n * n))

    def idx(i, j):
        return j * n + i

    # a runs along the bond, b across it; the hopping depends on the parity of a
    for a in range(n):
        for step, even_t, odd_t in ((1, params.t1, params.t2), (3, params.t3, params.t4)):
            t = even_t if a % 2 == 0 else odd_t
            end = a + step
            if end >= n:
                if not periodic:
                    continue
                end %= n
            for b in range(n):
                for p, q in ((idx(a, b), idx(end, b)), (idx(b, a), idx(b, end))):
                    M[p, q] += t
                    M[q, p] += t
    return M


@dataclass(frozen=True, eq=False)
class ModeClassification:
    labels: list
    ipr: np.ndarray
    boundary_fraction: np.ndarray
    corner_fraction: np.ndarray

    def count(self, label):
        return sum(1 for l in self.labels if l == label)


@dataclass(frozen=True, eq=False)
class FiniteSpectrum:
    """eigenvalues is the raw sorted spectrum; energies/vectors follow the labelled (rotated) states."""

    eigenvalues: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    classification: ModeClassification

    def rows(self):
        """(index, energy, label, ipr, boundary_fraction, corner_fraction)."""
        c = self.classification
        for k, e in enumerate(self.energies):
            yield k, float(e), c.labels[k], float(c.ipr[k]), float(c.boundary_fraction[k]), float(c.corner_fraction[k])


def _cell_masks(cells):
    cells = np.asarray(cells)
    n = int(cells.max()) + 1
    outer = (0, 1, n - 2, n - 1)
    on_x = np.isin(cells[:, 0], outer)
    on_y = np.isin(cells[:, 1], outer)
    corner = on_x & on_y
    boundary = (on_x | on_y) & ~corner
    return boundary, corner


def _grid_cells(n_states):
    n = int(round(np.sqrt(n_states)))
    if n * n != n_states:
        raise ConfigError(f"cannot infer a square array from {n_states} states")
    return [(i, j) for j in range(n) for i in range(n)]


def finite_spectrum(array, couplings, zero_window=ZERO_WINDOW):
    """
    Dense spectrum of the coupling matrix with bulk/edge/corner labels.

    array supplies the (i, j) cell of every emitter (a SpinArray, a list of
    cells, or None for a square grid in row-major order). The near-zero
    cluster, |E| <= zero_window * max|E| and always the four smallest |E|, is
    rotated to diagonalize the corner projector inside it; only its four most
    corner-weighted vectors may be labelled corner.
    """
    couplings = np.asarray(couplings)
    if not np.allclose(couplings, couplings.conj().T, atol=1e-14):
        raise ConfigError("coupling matrix is not Hermitian")
    cells = getattr(array, "cells", array)
    if cells is None:
        cells = _grid_cells(couplings.shape[0])
    boundary, corner = _cell_masks(cells)

    eigenvalues, V = la.eigh(couplings)
    scale = np.max(np.abs(eigenvalues))
    order = np.argsort(np.abs(eigenvalues))
    cluster = set(order[:N_CORNERS].tolist())
    cluster |= set(np.flatnonzero(np.abs(eigenvalues) <= zero_window * scale).tolist())
    cluster = np.array(sorted(cluster))

    Vc = V[:, cluster]
    P = Vc.conj().T @ (corner[:, None] * Vc)
    _, rot = la.eigh(P)
    Vc = Vc @ rot[:, ::-1]
    V = V.copy()
    V[:, cluster] = Vc
    energies = eigenvalues.copy()
    energies[cluster] = np.real(np.einsum("ij,ik,kj->j", Vc.conj(), couplings, Vc))
    candidates = set(cluster[:N_CORNERS].tolist())

    weights = np.abs(V) ** 2
    corner_frac = weights[corner].sum(axis=0)
    boundary_frac = weights[boundary].sum(axis=0)
    ipr = np.sum(weights**2, axis=0)
    labels = []
    for k in range(energies.size):
        if k in candidates and corner_frac[k] >= CORNER_THRESHOLD:
            labels.append("corner")
        elif boundary_frac[k] >= EDGE_THRESHOLD:
            labels.append("edge")
        else:
            labels.append("bulk")

    sort = np.argsort(energies, kind="stable")
    classification = ModeClassification([labels[k] for k in sort], ipr[sort], boundary_frac[sort], corner_frac[sort])
    logger.info(
        "finite spectrum: %d states, %d corner, %d edge",
        energies.size,
        classification.count("corner"),
        classification.count("edge"),
    )
    return FiniteSpectrum(eigenvalues, energies[sort], V[:, sort], classification)


def _lowest_band(H):
    w, v = la.eigh(H)
    return w, v[:, 0]


def _snap(p):
    p = p % 1.0
    for target in (0.0, 0.5, 1.0):
        if abs(p - target) < SNAP_TOL:
            return target % 1.0, True
    return p, False


def wilson_polarization(source, n_k=64):
    """
    Polarization (P_x, P_y) of the lowest band from discretized Wilson loops.

    source is an SSHParams or a callable kbar -> Bloch matrix. Each component
    averages the loop phase over the transverse momentum on the unit circle,
    then is snapped to {0, 1/2} within SNAP_TOL.
    """
    bloch = (lambda k: ssh_bloch(source, k)) if isinstance(source, SSHParams) else source
    ks = 2 * np.pi * np.arange(n_k) / n_k

    vectors = np.empty((n_k, n_k), dtype=object)
    min_gap = np.inf
    for iy, ky in enumerate(ks):
        for ix, kx in enumerate(ks):
            w, u = _lowest_band(bloch(KPoint(kx, ky)))
            min_gap = min(min_gap, w[1] - w[0])
            vectors[iy, ix] = u
    if min_gap < MIN_GAP:
        raise GaplessError(f"lowest band touches the next one on the grid (gap {min_gap:.2e})", gap=float(min_gap))

    result = []
    for axis in (1, 0):
        phases = []
        for line in range(n_k):
            W = 1.0 + 0j
            for step in range(n_k):
                a = (line, step) if axis == 1 else (step, line)
                b = (line, (step + 1) % n_k) if axis == 1 else ((step + 1) % n_k, line)
                W *= np.vdot(vectors[a], vectors[b])
            phases.append(np.exp(-1j * np.angle(W)))
        p = float(np.angle(np.mean(phases)) / (2 * np.pi)) % 1.0
        snapped, ok = _snap(p)
        if not ok:
            warnings.warn(f"polarization {p:.4f} is not quantized", SymmetryBreakingWarning, stacklevel=2)
            snapped = p
        result.append(snapped)
    logger.debug("Wilson polarization on n_k=%d: %s (min gap %.3e)", n_k, result, min_gap)
    return tuple(result)
