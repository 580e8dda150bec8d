"""
Small-atom bound states inside the middle gap.

Two routes are provided. The momentum route solves the pole equation
E = Delta + Sigma_e(E) on a periodic k-grid and transforms the resolvent to
real space with an FFT. The real-space route diagonalizes the finite bath
plus emitter, optionally with hopping disorder, and picks the in-gap
eigenvector with the largest emitter weight.
"""
import logging
import warnings
from functools import lru_cache

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from joblib import Parallel, delayed
from scipy.optimize import brentq
from tqdm import tqdm

from src.data.run_state import RunState
from src.emitters.emitter import BoundStateSolution
from src.errors import (
    ConfigError,
    HybridizationFailureError,
    NoBoundStateError,
    PrincipalValueError,
    ResolutionWarning,
)
from src.lattice.bands import _angles, _bands, _f, gap_halfwidth, k_grid
from src.lattice.bilayer import DisorderRealization, build_realspace_hamiltonian, chiral_operator

logger = logging.getLogger(__name__)

DEFAULT_NK = 128
MIN_NK = 64
EDGE_MARGIN = 1e-6
DECAY_TARGET = 1e-8
DENSE_LIMIT = 5000
DEGENERACY_TOL = 1e-10
MIN_EMITTER_WEIGHT = 0.5


def momentum_resolvent(k_x, k_y, E, lat, layer=1):
    """
    Column of (E - H(k))^-1 for an emitter on ``layer``.

    Returns (a1, a2): the layer-1 and layer-2 photon amplitudes per unit
    coupling with C_e = 1. Vectorized over k_x, k_y.
    """
    f = _f(k_x, k_y, lat.J)
    det = (E - f) * (E - lat.eta * f) - lat.G**2
    if layer == 1:
        return (E - lat.eta * f) / det, lat.G / det
    return lat.G / det, (E - f) / det


def bs_momentum_amplitudes(k, E_BS, lat):
    """
    Layer-resolved amplitudes for a layer-1 emitter, written through the
    polariton angles: a1 = s^2/(E-w_u) + c^2/(E-w_l), a2 = s c [1/(E-w_u) - 1/(E-w_l)].
    """
    _check_in_gap(E_BS, lat)
    f = np.asarray(_f(k.k_x, k.k_y, lat.J))
    w_u, w_l = _bands(f, lat)
    s, c = _angles(f, lat)
    du = 1.0 / (E_BS - w_u)
    dl = 1.0 / (E_BS - w_l)
    return float(s**2 * du + c**2 * dl), float(s * c * (du - dl))


def _check_in_gap(z, lat):
    gap = gap_halfwidth(lat)
    if abs(z) >= gap:
        raise PrincipalValueError(
            f"energy {z} lies outside the middle gap (half width {gap}); the k-sum needs a principal value",
            energy=z,
            gap=gap,
        )
    return gap


def _grid(n_k):
    k = k_grid(n_k)
    k_y, k_x = np.meshgrid(k, k, indexing="ij")
    return k_x, k_y


def self_energy(z, lat, layer=1, g=1.0, n_k=DEFAULT_NK):
    """Sigma_e(z) = g^2/N sum_k [(z - H(k))^-1]_{layer,layer} for z inside the middle gap."""
    _check_in_gap(z, lat)
    if n_k < DEFAULT_NK:
        warnings.warn(f"self-energy grid n_k={n_k} below {DEFAULT_NK}", ResolutionWarning, stacklevel=2)
    k_x, k_y = _grid(n_k)
    a1, a2 = momentum_resolvent(k_x, k_y, z, lat, layer)
    diag = a1 if layer == 1 else a2
    return float(g**2 * np.mean(diag))


def _single_point(emitter):
    if not emitter.is_small:
        raise ConfigError("small-atom routines need exactly one coupling point")
    return emitter.points[0]


def solve_pole(emitter, lat, n_k=DEFAULT_NK):
    """Real root of E - Delta - Sigma_e(E) inside the middle gap."""
    point = _single_point(emitter)
    gap = gap_halfwidth(lat)
    if emitter.delta == 0.0:
        # Sigma_e(0) is a k-sum odd in f, so the root sits at zero
        return 0.0
    if abs(emitter.delta) >= gap:
        raise NoBoundStateError(
            f"detuning {emitter.delta} outside the middle gap (half width {gap})", delta=emitter.delta, gap=gap
        )

    k_x, k_y = _grid(n_k)

    def pole(z):
        a1, a2 = momentum_resolvent(k_x, k_y, z, lat, point.layer)
        diag = a1 if point.layer == 1 else a2
        return z - emitter.delta - point.g**2 * np.mean(diag)

    lo = -gap * (1 - EDGE_MARGIN)
    hi = gap * (1 - EDGE_MARGIN)
    f_lo, f_hi = pole(lo), pole(hi)
    if f_lo * f_hi > 0:
        raise NoBoundStateError(
            "pole equation has no sign change across the middle gap", f_lo=float(f_lo), f_hi=float(f_hi)
        )
    root = brentq(pole, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    logger.debug("pole at E=%.15g (delta=%g, g=%g, n_k=%d)", root, emitter.delta, point.g, n_k)
    return float(root)


@lru_cache(maxsize=32)
def unit_profile(lat, E, layer, n_k):
    """
    Real-space photon amplitudes per unit coupling (C_e = 1, g = 1) for an
    emitter on ``layer`` at the array centre (n_k//2, n_k//2). Read-only.
    """
    k_x, k_y = _grid(n_k)
    a1, a2 = momentum_resolvent(k_x, k_y, E, lat, layer)
    out = []
    for a in (a1, a2):
        field = np.fft.fftshift(np.fft.ifft2(a))
        field.setflags(write=False)
        out.append(field)
    return tuple(out)


def _check_power_of_two(n_k):
    if n_k < MIN_NK or n_k & (n_k - 1):
        raise ConfigError(f"n_k must be a power of two >= {MIN_NK}, got {n_k}")


def decay_check(fields, label="bound state"):
    """Warn when the outermost ring of the box is not below DECAY_TARGET of the peak."""
    peak = max(np.max(np.abs(f)) for f in fields)
    if peak == 0:
        return 0.0
    edge = 0.0
    for f in fields:
        ring = np.concatenate([f[0], f[-1], f[:, 0], f[:, -1]])
        edge = max(edge, float(np.max(np.abs(ring))))
    ratio = edge / peak
    if ratio > DECAY_TARGET:
        warnings.warn(
            f"{label} decays only to {ratio:.2e} of its peak at the box edge; increase n_k",
            ResolutionWarning,
            stacklevel=3,
        )
    return ratio


def _normalized(c_e, a1, a2):
    norm = abs(c_e) ** 2 + np.sum(np.abs(a1) ** 2) + np.sum(np.abs(a2) ** 2)
    scale = 1.0 / np.sqrt(norm)
    return c_e * scale, a1 * scale, a2 * scale


def bs_realspace_profile(emitter, lat, n_k=DEFAULT_NK):
    """Normalized bound state of a small atom from the momentum route."""
    point = _single_point(emitter)
    _check_power_of_two(n_k)
    energy = solve_pole(emitter, lat, n_k)
    u1, u2 = unit_profile(lat, energy, point.layer, n_k)
    a1 = point.g * np.array(u1)
    a2 = point.g * np.array(u2)
    decay_check((a1, a2))
    c_e, a1, a2 = _normalized(1.0, a1, a2)
    return BoundStateSolution(
        energy=energy,
        c_e=float(c_e),
        field_a1=a1,
        field_a2=a2,
        method="quadrature",
        origin=(n_k // 2, n_k // 2),
        params={"n_k": n_k, "lattice": lat.to_dict(), "emitter": emitter.to_dict()},
    )


def coupling_vector(emitter, lat):
    """Emitter-bath coupling column; point offsets are taken relative to lat.center()."""
    x0, y0 = lat.center()
    v = np.zeros(lat.dim)
    for p in emitter.points:
        nx, ny = x0 + p.n_x, y0 + p.n_y
        if lat.periodic:
            nx, ny = nx % lat.L_x, ny % lat.L_y
        v[lat.index(p.layer, nx, ny)] += p.g
    return v


def emitter_hamiltonian(emitter, lat, dis=None):
    """Bath plus one emitter appended as the last basis state."""
    H = build_realspace_hamiltonian(lat, dis)
    v = sp.csr_matrix(coupling_vector(emitter, lat)).T
    return sp.bmat([[H, v], [v.T, sp.csr_matrix([[emitter.delta]])]], format="csr")


def window_eigenpairs(H, lo, hi, sigma, n_eigs=24):
    """Eigenpairs of H with lo < E < hi, dense for small H and shift-invert otherwise."""
    if H.shape[0] <= DENSE_LIMIT:
        w, V = la.eigh(H.toarray(), subset_by_value=(lo, hi))
    else:
        k = min(n_eigs, H.shape[0] - 2)
        w, V = spla.eigsh(H, k=k, sigma=sigma, which="LM")
        order = np.argsort(w)
        w, V = w[order], V[:, order]
    keep = (w > lo) & (w < hi)
    return w[keep], V[:, keep]


def bs_exact_diagonalization(emitter, lat, dis=None, n_eigs=24):
    """In-gap eigenstate of bath plus emitter with the largest emitter weight."""
    gap = gap_halfwidth(lat)
    H = emitter_hamiltonian(emitter, lat, dis)
    lo, hi = -gap * (1 - EDGE_MARGIN), gap * (1 - EDGE_MARGIN)
    w, V = window_eigenpairs(H, lo, hi, emitter.delta + 1e-3 * gap, n_eigs)
    if w.size == 0:
        raise HybridizationFailureError("no eigenvalue inside the middle gap", gap=gap)

    weights = np.abs(V[-1]) ** 2
    best = int(np.argmax(weights))
    # inside a degenerate cluster take the projection of the emitter state
    cluster = np.abs(w - w[best]) < DEGENERACY_TOL
    if np.count_nonzero(cluster) > 1:
        Vc = V[:, cluster]
        psi = Vc @ Vc[-1].conj()
        psi = psi / np.linalg.norm(psi)
        energy = float(np.mean(w[cluster]))
    else:
        psi = V[:, best]
        energy = float(w[best])

    weight = float(abs(psi[-1]) ** 2)
    if weight <= MIN_EMITTER_WEIGHT:
        top = np.argsort(weights)[::-1][:2]
        raise HybridizationFailureError(
            f"largest in-gap emitter weight {weight:.3f} does not exceed {MIN_EMITTER_WEIGHT}",
            candidates=[(float(w[i]), float(weights[i])) for i in top],
        )

    psi = psi * (abs(psi[-1]) / psi[-1])
    fields = psi[:-1].reshape(2, lat.L_y, lat.L_x)
    logger.debug("exact diagonalization E=%.3e weight=%.4f dim=%d", energy, weight, H.shape[0])
    return BoundStateSolution(
        energy=energy,
        c_e=float(abs(psi[-1])),
        field_a1=fields[0].astype(complex),
        field_a2=fields[1].astype(complex),
        method="exact_diag",
        origin=lat.center(),
        params={
            "lattice": lat.to_dict(),
            "emitter": emitter.to_dict(),
            "disorder": None if dis is None else dis.to_dict(),
        },
    )


def _zero_mode_run(emitter, lat, seed, W_intra, W_inter, W_onsite):
    dis = DisorderRealization.generate(lat, seed, W_intra, W_inter, W_onsite)
    H = emitter_hamiltonian(emitter, lat, dis)
    gap = gap_halfwidth(lat)
    w, V = window_eigenpairs(H, -gap, gap, 1e-7 * gap, n_eigs=8)
    if w.size == 0:
        return {"seed": seed, "min_abs_E": float("nan"), "coupled_norm": float("nan"), "c_e": float("nan")}
    i = int(np.argmin(np.abs(w)))
    psi = V[:, i]
    # photonic weight on the chiral sublattice of the emitter's own site
    lam = chiral_operator(lat)
    site = np.flatnonzero(coupling_vector(emitter, lat))[0]
    same = lam == lam[site]
    return {
        "seed": seed,
        "min_abs_E": float(abs(w[i])),
        "coupled_norm": float(np.sum(np.abs(psi[:-1][same]) ** 2)),
        "c_e": float(abs(psi[-1])),
    }


def zero_mode_ensemble(emitter, lat, seeds, W_intra, W_inter, W_onsite=0.0):
    """
    Bound-state robustness over disorder seeds.

    One row per seed with the smallest |E| in the spectrum and the photonic
    norm of that eigenvector on the sublattice the emitter couples to.
    """
    seeds = list(seeds)
    state = RunState.get_instance()
    runs = Parallel(n_jobs=state.threads)(
        delayed(_zero_mode_run)(emitter, lat, s, W_intra, W_inter, W_onsite)
        for s in tqdm(seeds, desc="disorder seeds", disable=not state.show_progress)
    )
    logger.info("zero-mode ensemble: %d seeds, W=(%g, %g, %g)", len(seeds), W_intra, W_inter, W_onsite)
    return runs


def solve_bound_state(emitter, lat, method="quadrature", n_k=DEFAULT_NK, dis=None, n_eigs=24):
    if method == "quadrature":
        if dis is not None:
            raise ConfigError("the quadrature profile describes the clean bath; use exact_diag with disorder")
        return bs_realspace_profile(emitter, lat, n_k)
    if method in ("exact", "exact_diag"):
        return bs_exact_diagonalization(emitter, lat, dis, n_eigs)
    raise ConfigError(f"unknown bound-state method {method!r}")
