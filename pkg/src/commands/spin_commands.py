import logging

import numpy as np

from src.commands.bath_commands import LATTICE_FLAGS
from src.commands.command import Command
from src.errors import ConfigError
from src.render.field_image import save_spectrum_png
from src.spins.spin_model import (
    cross_layer_table,
    effective_couplings,
    half_filled_array,
    load_spin_array,
    parity_violation,
    ssh_dimerized_array,
)
from src.spins.ssh import finite_spectrum, fit_ssh_params, ssh_finite_couplings, wilson_polarization

logger = logging.getLogger(__name__)

GEOMETRY_FLAGS = ("geometry", "size", "n_cells", "intra", "inter", "geometry_file", "spin_g", "nk")
SPECTRUM_HEADER = ("index", "energy", "label", "ipr", "boundary_fraction", "corner_fraction")


def build_spin_array(spins, lat):
    if spins.kind == "half-filled":
        return half_filled_array(lat, spins.size)
    if spins.kind == "ssh":
        return ssh_dimerized_array(lat, spins.n_cells, spins.intra, spins.inter)
    array = load_spin_array(spins.path)
    array.check_fits(lat)
    return array


def spin_couplings(config):
    lat = config.lattice.build()
    array = build_spin_array(config.spins, lat)
    couplings = effective_couplings(array, lat, config.spins.g, config.numerics.n_k)
    return lat, array, couplings


def _require_cells(array):
    if array.cells is None:
        raise ConfigError("this command needs a dimerized geometry with (i, j) cell indices")


def write_spectrum(command, config, stem, spectrum):
    command.csv(config, f"{stem}.csv", SPECTRUM_HEADER, spectrum.rows())


def write_mode(command, config, stem, array, spectrum, label):
    """The state with the given label closest to zero energy, as (layer, n_x, n_y, i, j, amplitude) rows."""
    labels = spectrum.classification.labels
    picks = [k for k, l in enumerate(labels) if l == label]
    if not picks:
        weights = spectrum.classification.corner_fraction if label == "corner" else spectrum.classification.boundary_fraction
        picks = [int(np.argmax(weights))]
        logger.warning("no mode labelled %s; writing the one with the largest %s weight", label, label)
    k = min(picks, key=lambda i: abs(spectrum.energies[i]))
    vec = spectrum.vectors[:, k]
    rows = (
        (layer, x, y, i, j, float(np.real(v)))
        for (layer, x, y), (i, j), v in zip(array.sites, array.cells, vec)
    )
    command.csv(config, f"{stem}.csv", ("layer", "n_x", "n_y", "i", "j", "amplitude"), rows)
    command.json(config, f"{stem}.json", {"index": k, "energy": float(spectrum.energies[k]), "label": labels[k]})


class SpinModelCommand(Command):
    name = "spinmodel"
    help = "effective spin couplings of an emitter array at Delta = 0"
    flags = LATTICE_FLAGS + GEOMETRY_FLAGS

    def execute(self, config, args):
        lat, array, couplings = spin_couplings(config)
        self.json(config, "sites.json", {"tag": array.tag, "meta": array.meta, "emitters": array.to_json()})
        n = len(array)
        self.csv(
            config,
            "couplings.csv",
            ("i", "j", "g_ij"),
            ((i, j, couplings[i, j]) for i in range(n) for j in range(i + 1, n) if couplings[i, j] != 0.0),
        )
        summary = {
            "n_emitters": n,
            "max_abs_coupling": float(np.max(np.abs(couplings))) if n > 1 else 0.0,
            "parity_violation": parity_violation(array, couplings),
        }
        if config.spins.kind == "half-filled":
            table = cross_layer_table(lat, config.spins.g, config.numerics.n_k)
            summary["f_S_table"] = [{"n_x": x, "n_y": y, "J12": v} for (x, y), v in sorted(table.items())]
        self.json(config, "spinmodel.json", summary)


class SSHSpectrumCommand(Command):
    name = "ssh-spectrum"
    help = "finite spin spectrum with bulk/edge/corner labels, full and truncated to t1..t4"
    flags = LATTICE_FLAGS + GEOMETRY_FLAGS + ("zero_window",)

    def execute(self, config, args):
        lat, array, couplings = spin_couplings(config)
        _require_cells(array)
        params = fit_ssh_params(couplings, array)
        full = finite_spectrum(array, couplings, config.numerics.zero_window)
        n_cells = (max(i for i, _ in array.cells) + 1) // 2
        truncated = finite_spectrum(None, ssh_finite_couplings(params, n_cells), config.numerics.zero_window)
        write_spectrum(self, config, "spectrum", full)
        write_spectrum(self, config, "spectrum_truncated", truncated)
        self.json(
            config,
            "ssh.json",
            {
                "t": params.as_tuple(),
                "topological_order": params.is_topological_order(),
                "corner_count": full.classification.count("corner"),
                "edge_count": full.classification.count("edge"),
                "truncated_corner_count": truncated.classification.count("corner"),
                "spectrum_asymmetry": float(np.max(np.abs(np.sort(full.eigenvalues) + np.sort(full.eigenvalues)[::-1]))),
            },
        )
        if args.png:
            self.artifacts.append(
                save_spectrum_png(full.energies, full.classification.labels, self.path(config, "spectrum.png"))
            )


class PolarizationCommand(Command):
    name = "polarization"
    help = "Wilson-loop polarization of the fitted SSH model"
    flags = LATTICE_FLAGS + GEOMETRY_FLAGS + ("wilson_nk",)

    def execute(self, config, args):
        _, array, couplings = spin_couplings(config)
        _require_cells(array)
        params = fit_ssh_params(couplings, array)
        p_x, p_y = wilson_polarization(params, config.numerics.wilson_nk)
        self.json(config, "polarization.json", {"P_x": p_x, "P_y": p_y, "t": params.as_tuple()})
