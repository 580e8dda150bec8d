import logging

from src.commands.command import Command
from src.lattice.bands import band_structure, density_of_states, gap_halfwidth

logger = logging.getLogger(__name__)

LATTICE_FLAGS = ("Lx", "Ly", "J", "eta", "G", "boundary")

BANDS_HEADER = ("k_x", "k_y", "omega_u", "omega_l")
ANGLES_HEADER = ("k_x", "k_y", "sin_theta", "cos_theta")
DOS_HEADER = ("energy_bin_center", "dos")


def write_bands(command, config, lat, n_k, stem="bands"):
    bands = band_structure(lat, n_k)
    k_x, k_y = bands.k_x.ravel(), bands.k_y.ravel()
    command.csv(config, f"{stem}.csv", BANDS_HEADER, zip(k_x, k_y, bands.omega_u.ravel(), bands.omega_l.ravel()))
    angles = zip(k_x, k_y, bands.sin_theta.ravel(), bands.cos_theta.ravel())
    command.csv(config, "angles.csv", ANGLES_HEADER, angles)
    if lat.G > 0:
        gap = gap_halfwidth(lat)
        # bands come in +- pairs, so the grid gap is twice the lowest upper-band energy
        command.json(
            config,
            f"{stem}_gap.json",
            {"gap_halfwidth": gap, "grid_gap": float(2 * bands.omega_u.min()), "n_k": n_k, "lattice": lat.to_dict()},
        )
    return bands


def write_dos(command, config, lat, n_k, n_bins, stem="dos"):
    centers, counts = density_of_states(lat, n_k, n_bins)
    command.csv(config, f"{stem}.csv", DOS_HEADER, zip(centers, counts))


class BandsCommand(Command):
    name = "bands"
    help = "hybridized bands and mixing angles on the uniform k-grid"
    flags = LATTICE_FLAGS + ("nk",)

    def execute(self, config, args):
        lat = config.lattice.build()
        write_bands(self, config, lat, config.numerics.n_k)


class DosCommand(Command):
    name = "dos"
    help = "density of states of both bands"
    flags = LATTICE_FLAGS + ("nk", "bins")

    def execute(self, config, args):
        lat = config.lattice.build()
        write_dos(self, config, lat, config.numerics.n_k, config.numerics.n_bins)
