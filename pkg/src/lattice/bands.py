"""
Momentum-space view of the bath: Bloch kernel, hybridized bands, polariton
mixing, the middle gap, density of states and thermal occupation.

Momentum-space results assume periodic boundaries and lattice constant 1.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from src.errors import ConfigError, DegenerateHybridizationError

logger = logging.getLogger(__name__)

MIN_DOS_NK = 32
MIN_DOS_BINS = 16


@dataclass(frozen=True)
class KPoint:
    k_x: float
    k_y: float

    def __post_init__(self):
        object.__setattr__(self, "k_x", _wrap(self.k_x))
        object.__setattr__(self, "k_y", _wrap(self.k_y))

    def shifted(self):
        """k + (pi, pi)."""
        return KPoint(self.k_x + np.pi, self.k_y + np.pi)


def _wrap(k):
    return float((k + np.pi) % (2 * np.pi) - np.pi)


def k_grid(n_k):
    """Uniform BZ sampling 2*pi*m/n_k in FFT order, values in [-pi, pi)."""
    return 2 * np.pi * np.fft.fftfreq(n_k)


def _f(k_x, k_y, J):
    return 2 * J * (np.cos(k_x) + np.cos(k_y))


def _bands(f, lat):
    a = (1 + lat.eta) / 2
    b = (1 - lat.eta) / 2
    r = np.sqrt((b * f) ** 2 + lat.G**2)
    return a * f + r, a * f - r


def _angles(f, lat):
    # x = w_u - f and y = w_u - eta*f satisfy x*y = G^2; take whichever is
    # free of cancellation and recover the other from the product.
    if lat.G <= 0:
        raise DegenerateHybridizationError("polariton angles need G > 0")
    b = (1 - lat.eta) / 2
    r = np.sqrt((b * f) ** 2 + lat.G**2)
    big = r + b * np.abs(f)
    small = lat.G**2 / big
    y = np.where(f >= 0, big, small)
    x = np.where(f >= 0, small, big)
    sin_theta = np.sqrt(y / (x + y))
    cos_theta = np.sqrt(x / (x + y))
    return sin_theta, cos_theta


def dispersion_f(k, J=1.0):
    return float(_f(k.k_x, k.k_y, J))


def bloch_kernel(k, lat):
    """2x2 Hermitian kernel [[f, G], [G, eta*f]]."""
    f = dispersion_f(k, lat.J)
    return np.array([[f, lat.G], [lat.G, lat.eta * f]], dtype=complex)


def band_energies(k, lat):
    w_u, w_l = _bands(dispersion_f(k, lat.J), lat)
    return float(w_u), float(w_l)


def polariton_angles(k, lat):
    s, c = _angles(np.asarray(dispersion_f(k, lat.J)), lat)
    return float(s), float(c)


def gap_halfwidth(lat):
    """
    Half width of the middle gap, min_k w_u(k).

    The minimum sits at f* = -(1+eta) G / ((1-eta) sqrt(-eta)), clipped to the
    attainable range of f. Only defined for eta < 0.
    """
    if lat.eta >= 0:
        raise ConfigError(f"middle gap requires eta < 0, got {lat.eta}")
    f_max = 4 * abs(lat.J)
    f_star = -(1 + lat.eta) * lat.G / ((1 - lat.eta) * np.sqrt(-lat.eta))
    f_star = float(np.clip(f_star, -f_max, f_max))
    w_u, _ = _bands(f_star, lat)
    return float(w_u)


@dataclass(frozen=True, eq=False)
class BandStructure:
    k_x: np.ndarray
    k_y: np.ndarray
    omega_u: np.ndarray
    omega_l: np.ndarray
    sin_theta: np.ndarray
    cos_theta: np.ndarray

    def rows(self):
        """(k_x, k_y, omega_u, omega_l) rows in grid order."""
        return zip(self.k_x.ravel(), self.k_y.ravel(), self.omega_u.ravel(), self.omega_l.ravel())


def band_structure(lat, n_k):
    """Bands and mixing amplitudes on the n_k x n_k grid; arrays indexed [i_y, i_x]."""
    k = k_grid(n_k)
    k_y, k_x = np.meshgrid(k, k, indexing="ij")
    f = _f(k_x, k_y, lat.J)
    w_u, w_l = _bands(f, lat)
    if lat.G > 0:
        s, c = _angles(f, lat)
    else:
        s = np.full_like(f, np.nan)
        c = np.full_like(f, np.nan)
    return BandStructure(k_x, k_y, w_u, w_l, s, c)


def density_of_states(lat, n_k, n_bins):
    """Histogram of both bands over the BZ grid, normalized to unit area."""
    if n_k < MIN_DOS_NK:
        raise ConfigError(f"density_of_states needs n_k >= {MIN_DOS_NK}, got {n_k}")
    if n_bins < MIN_DOS_BINS:
        raise ConfigError(f"density_of_states needs n_bins >= {MIN_DOS_BINS}, got {n_bins}")
    bands = band_structure(lat, n_k)
    energies = np.concatenate([bands.omega_u.ravel(), bands.omega_l.ravel()])
    counts, edges = np.histogram(energies, bins=n_bins, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, counts


def thermal_occupation(omega, E_F, kT):
    """Fermi-Dirac occupation; kT = 0 gives the step function with 0.5 at E_F."""
    if kT < 0:
        raise ConfigError(f"temperature must be >= 0, got kT={kT}")
    if kT == 0:
        if omega < E_F:
            return 1.0
        return 0.5 if omega == E_F else 0.0
    return float(expit(-(omega - E_F) / kT))
