"""
Giant atoms: emitters coupled to the bath at several points.

The bound state of a giant atom is the superposition of shifted small-atom
profiles, one per coupling point, weighted by the point's strength. In
momentum space the same statement is the interference factor
I(k) = sum_p g_p exp(i k.n_p) multiplying the small-atom amplitudes.
"""
import logging

import numpy as np
from scipy.optimize import brentq

from src.emitters.bound_state import (
    DEFAULT_NK,
    EDGE_MARGIN,
    _check_power_of_two,
    _grid,
    _normalized,
    decay_check,
    momentum_resolvent,
    unit_profile,
)
from src.emitters.emitter import BoundStateSolution, CouplingPoint, EmitterConfig
from src.errors import ConfigError, DecompositionError, NoBoundStateError, ParityViolationError
from src.lattice.bands import gap_halfwidth

logger = logging.getLogger(__name__)

PHASE_TOL = 1e-6
REAL_TOL = 1e-8


def interference_factor(points, k):
    """I(k) = sum_p g_p exp(i k.n_p) over one layer's coupling points."""
    total = 0j
    for p in points:
        total += p.g * np.exp(1j * (k.k_x * p.n_x + k.k_y * p.n_y))
    return complex(total)


def _layer_factor(points, layer, k_x, k_y):
    total = np.zeros(np.shape(k_x), dtype=complex)
    for p in points:
        if p.layer == layer:
            total += p.g * np.exp(1j * (k_x * p.n_x + k_y * p.n_y))
    return total


def cross_point_atom(g=1.0, delta=0.0):
    """Four layer-1 points (+-1, 0), (0, +-1); I(k) = g f(k)/J."""
    pts = tuple(CouplingPoint(1, x, y, g) for x, y in ((1, 0), (-1, 0), (0, 1), (0, -1)))
    return EmitterConfig(delta, pts)


def diagonal_point_atom(g=1.0, delta=0.0):
    """
    Four layer-1 points on the diagonals with signs (+, -, -, +).

    I(k) = -4 g sin k_x sin k_y; same zero set and modulus as +4 g sin k_x sin k_y,
    the global sign does not change the bound-state shape.
    """
    signs = {(1, 1): 1, (1, -1): -1, (-1, 1): -1, (-1, -1): 1}
    pts = tuple(CouplingPoint(1, x, y, s * g) for (x, y), s in signs.items())
    return EmitterConfig(delta, pts)


def giant_self_energy(emitter, lat, z, n_k=DEFAULT_NK):
    """(1/N) sum_k v(k)^+ (z - H(k))^-1 v(k) with v = (I_1(k), I_2(k))."""
    k_x, k_y = _grid(n_k)
    i1 = _layer_factor(emitter.points, 1, k_x, k_y)
    i2 = _layer_factor(emitter.points, 2, k_x, k_y)
    r11, r21 = momentum_resolvent(k_x, k_y, z, lat, layer=1)
    _, r22 = momentum_resolvent(k_x, k_y, z, lat, layer=2)
    val = np.abs(i1) ** 2 * r11 + np.abs(i2) ** 2 * r22 + 2 * np.real(np.conj(i1) * i2) * r21
    return float(np.mean(val.real))


def solve_giant_pole(emitter, lat, n_k=DEFAULT_NK):
    gap = gap_halfwidth(lat)
    if emitter.delta == 0.0 and emitter.is_parity_preserving():
        return 0.0
    if abs(emitter.delta) >= gap:
        raise NoBoundStateError(f"detuning {emitter.delta} outside the middle gap", delta=emitter.delta, gap=gap)

    def pole(z):
        return z - emitter.delta - giant_self_energy(emitter, lat, z, n_k)

    lo, hi = -gap * (1 - EDGE_MARGIN), gap * (1 - EDGE_MARGIN)
    if pole(lo) * pole(hi) > 0:
        raise NoBoundStateError("giant-atom pole equation has no sign change across the middle gap")
    return float(brentq(pole, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))


def giant_bs_profile(emitter, lat, n_k=DEFAULT_NK, allow_parity_violation=False):
    """
    Bound state of a giant atom as the weighted sum of shifted small-atom profiles.

    Each point contributes g_p times the unit-coupling profile of an emitter on
    its layer, rolled to its site. Per-point contributions are kept on the
    solution (same normalization) for phase_profile.
    """
    _check_power_of_two(n_k)
    if not emitter.is_parity_preserving() and not allow_parity_violation:
        raise ParityViolationError(
            "coupling points do not share one chiral sublattice; the odd-neighbour bound state is not protected",
            points=[(p.layer, p.n_x, p.n_y) for p in emitter.points],
        )
    energy = solve_giant_pole(emitter, lat, n_k)

    contributions = []
    for p in emitter.points:
        u1, u2 = unit_profile(lat, energy, p.layer, n_k)
        shift = (p.n_y, p.n_x)
        contributions.append(
            (p.g * np.roll(u1, shift, axis=(0, 1)), p.g * np.roll(u2, shift, axis=(0, 1)))
        )
    a1 = np.sum([c[0] for c in contributions], axis=0)
    a2 = np.sum([c[1] for c in contributions], axis=0)
    decay_check((a1, a2), label="giant-atom bound state")

    c_e, b1, b2 = _normalized(1.0, a1, a2)
    scale = c_e
    logger.debug("giant atom with %d points, E=%.3e, scale=%.4e", len(emitter.points), energy, scale)
    return BoundStateSolution(
        energy=energy,
        c_e=float(c_e),
        field_a1=b1,
        field_a2=b2,
        method="quadrature",
        origin=(n_k // 2, n_k // 2),
        params={"n_k": n_k, "lattice": lat.to_dict(), "emitter": emitter.to_dict()},
        contributions=[(scale * c1, scale * c2) for c1, c2 in contributions],
    )


def line_sites(offset, span):
    """Sites n = (m + offset, m) of the line n_x = n_y + offset for |m| <= span."""
    return [(m + offset, m) for m in range(-span, span + 1)]


def _real_signed(values, label):
    values = np.asarray(values)
    peak = np.max(np.abs(values))
    if peak > 0 and np.max(np.abs(values.imag)) > REAL_TOL * peak:
        raise DecompositionError(f"{label} is not real up to a global phase")
    return values.real


def phase_profile(sol, offset=1, span=15, layer=1):
    """
    Relative phase of the two point contributions along n_x = n_y + offset.

    Returns rows (site, amplitude, delta_theta, A, B) where A and B are the
    signed real contributions of the two points and delta_theta is 0 when
    they carry the same sign, pi otherwise.
    """
    if len(sol.contributions) != 2:
        raise DecompositionError(
            f"phase decomposition needs exactly two point contributions, got {len(sol.contributions)}"
        )
    sites = line_sites(offset, span)
    x0, y0 = sol.origin
    idx = layer - 1
    first = [sol.contributions[0][idx][y0 + y, x0 + x] for x, y in sites]
    second = [sol.contributions[1][idx][y0 + y, x0 + x] for x, y in sites]
    # a common global phase is allowed; remove it from the larger contribution
    ref = max(first + second, key=abs)
    phase = abs(ref) / ref if ref != 0 else 1.0
    A = _real_signed(np.asarray(first) * phase, "first contribution")
    B = _real_signed(np.asarray(second) * phase, "second contribution")

    rows = []
    for site, a, b in zip(sites, A, B):
        theta_1 = np.angle(a) if a != 0 else 0.0
        theta_2 = np.angle(b) if b != 0 else 0.0
        delta = np.mod(theta_1 - theta_2, 2 * np.pi)
        delta_theta = np.pi if abs(delta - np.pi) < PHASE_TOL else 0.0
        rows.append((site, float(a + b), delta_theta, float(a), float(b)))
    return rows


def phase_jumps(rows):
    """Sites where delta_theta changes between consecutive rows."""
    return [rows[i][0] for i in range(1, len(rows)) if rows[i][2] != rows[i - 1][2]]


def chirality_ratio(rows, pivot=0):
    """Summed |amplitude|^2 on the line before the pivot index over after it."""
    mid = len(rows) // 2 + pivot
    left = sum(r[1] ** 2 for r in rows[:mid])
    right = sum(r[1] ** 2 for r in rows[mid + 1 :])
    return left / right if right > 0 else float("inf")


def branch_mask(sol, ray, shells=(5, 15)):
    """Sites within perpendicular distance 1 of the ray from the origin, |n|_inf inside shells."""
    dx, dy = sol.offsets()
    u = np.asarray(ray, dtype=float)
    u = u / np.linalg.norm(u)
    along = dx * u[0] + dy * u[1]
    perp = np.abs(dx * u[1] - dy * u[0])
    radius = np.maximum(np.abs(dx), np.abs(dy))
    return (along > 0) & (perp <= 1.0) & (radius >= shells[0]) & (radius <= shells[1])


def branch_norm(sol, ray, shells=(5, 15)):
    mask = branch_mask(sol, ray, shells)
    return float(np.sum(np.abs(sol.field_a1[mask]) ** 2) + np.sum(np.abs(sol.field_a2[mask]) ** 2))


def window_fraction(sol, half_width):
    """Fraction of the photonic norm outside the window |n_x|, |n_y| <= half_width."""
    total = sol.photonic_norm()
    if total == 0:
        return 0.0
    inside = np.sum(np.abs(sol.window(1, half_width)) ** 2) + np.sum(np.abs(sol.window(2, half_width)) ** 2)
    return float((total - inside) / total)


def preset(name, g=1.0):
    """Named point sets used by the giant command."""
    if name == "pair":
        return EmitterConfig(0.0, (CouplingPoint(1, 0, 0, g), CouplingPoint(1, 1, 1, g)))
    if name == "cross":
        return cross_point_atom(g)
    if name == "diagonal":
        return diagonal_point_atom(g)
    if name == "chiral":
        return EmitterConfig(0.0, (CouplingPoint(1, 0, 0, g), CouplingPoint(2, 1, 0, g)))
    raise ConfigError(f"unknown giant-atom preset {name!r}")
