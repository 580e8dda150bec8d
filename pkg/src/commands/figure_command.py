import logging

import numpy as np

from src.commands.bath_commands import write_bands, write_dos
from src.commands.command import FIELD_HEADER, Command
from src.commands.emitter_commands import bound_state_summary, giant_diagnostics, write_phase_profile
from src.commands.entangle_command import write_entangle
from src.commands.spin_commands import write_mode, write_spectrum
from src.data.figures import FIGURE_POOL, get_figure
from src.dynamics.entangle import EntangleSetup, star_coupling
from src.emitters import giant_atom
from src.emitters.bound_state import bs_exact_diagonalization
from src.emitters.emitter import EmitterConfig
from src.lattice.bilayer import BilayerLattice, DisorderRealization
from src.render.field_image import save_field_png, save_spectrum_png
from src.spins.spin_model import effective_couplings, ssh_dimerized_array
from src.spins.ssh import finite_spectrum, fit_ssh_params

logger = logging.getLogger(__name__)


class ReproduceFigureCommand(Command):
    """Writes the data behind one named figure into the output directory."""

    name = "reproduce-figure"
    help = "data artifacts behind one figure: " + ", ".join(f["name"] for f in FIGURE_POOL)

    def add_arguments(self, parser):
        parser.add_argument("target", choices=[f["name"] for f in FIGURE_POOL])

    def execute(self, config, args):
        fig = get_figure(config.target)
        lat = BilayerLattice.from_dict(fig["lattice"])
        logger.info("reproducing %s: %s", fig["name"], fig["description"])
        self.json(config, "figure.json", fig)
        runner = getattr(self, "_" + fig["name"])
        runner(config, lat, fig["params"], args.png)

    def _layer_fields(self, config, stem, sol, png):
        """One CSV per layer, the way the figure panels are split."""
        for layer in (1, 2):
            rows = (r for r in sol.rows() if r[0] == layer)
            self.csv(config, f"{stem}_a{layer}.csv", FIELD_HEADER, rows)
        self.json(config, f"{stem}.json", bound_state_summary(sol))
        if png:
            self.artifacts.append(save_field_png(sol, self.path(config, f"{stem}.png")))

    def _fig1b(self, config, lat, p, png):
        write_bands(self, config, lat, p["n_k"])
        write_dos(self, config, lat, p["n_k"], p["n_bins"])

    def _fig2(self, config, lat, p, png):
        emitter = EmitterConfig.small(0.0, p["g"])
        clean = bs_exact_diagonalization(emitter, lat)
        self._layer_fields(config, "clean", clean, png)
        dis = DisorderRealization.generate(lat, p["seed"], p["W_intra"], p["W_inter"])
        self._layer_fields(config, "disordered", bs_exact_diagonalization(emitter, lat, dis), png)

    def _fig3(self, config, lat, p, png):
        for stem in ("pair", "diagonal"):
            sol = giant_atom.giant_bs_profile(giant_atom.preset(stem, p["g"]), lat, p["n_k"])
            self.field(config, stem, sol)
            self.json(config, f"{stem}_diagnostics.json", giant_diagnostics(sol))
            if png:
                self.artifacts.append(save_field_png(sol, self.path(config, f"{stem}.png"), half_width=15))

    def _ssh(self, lat, p):
        array = ssh_dimerized_array(lat, p["n_cells"], p["intra"], p["inter"])
        couplings = effective_couplings(array, lat, p["g"], p["n_k"])
        return array, couplings

    def _fig4d(self, config, lat, p, png):
        array, couplings = self._ssh(lat, p)
        spectrum = finite_spectrum(array, couplings)
        params = fit_ssh_params(couplings, array)
        write_spectrum(self, config, "spectrum", spectrum)
        self.json(
            config,
            "fig4d.json",
            {
                "t": params.as_tuple(),
                "corner_count": spectrum.classification.count("corner"),
                "edge_count": spectrum.classification.count("edge"),
            },
        )
        if png:
            self.artifacts.append(
                save_spectrum_png(spectrum.energies, spectrum.classification.labels, self.path(config, "spectrum.png"))
            )

    def _fig4e(self, config, lat, p, png):
        array, couplings = self._ssh(lat, p)
        write_mode(self, config, "edge_mode", array, finite_spectrum(array, couplings), p["mode"])

    def _fig4f(self, config, lat, p, png):
        array, couplings = self._ssh(lat, p)
        write_mode(self, config, "corner_mode", array, finite_spectrum(array, couplings), p["mode"])

    def _fig5(self, config, lat, p, png):
        write_bands(self, config, lat, p["n_k"])
        write_dos(self, config, lat, p["n_k"], p["n_bins"])
        dis = DisorderRealization.generate(lat, p["seed"], p["W_intra"], p["W_inter"])
        for delta in p["deltas"]:
            sol = bs_exact_diagonalization(EmitterConfig.small(delta, p["g"]), lat, dis)
            self._layer_fields(config, f"delta_{delta:g}", sol, png)

    def _fig6(self, config, lat, p, png):
        cross = giant_atom.giant_bs_profile(giant_atom.preset("cross", p["g"]), lat, p["n_k"])
        self.field(config, "cross", cross)
        self.json(config, "cross_diagnostics.json", giant_diagnostics(cross))
        chiral = giant_atom.giant_bs_profile(giant_atom.preset("chiral", p["g"]), lat, p["n_k"])
        self.field(config, "chiral", chiral)
        rows = write_phase_profile(self, config, chiral, "chiral_phase", p["span"])
        self.json(
            config,
            "chiral_diagnostics.json",
            {
                **giant_diagnostics(chiral),
                "phase_jumps": [list(s) for s in giant_atom.phase_jumps(rows)],
                "chirality_ratio": giant_atom.chirality_ratio(rows),
            },
        )
        if png:
            for stem, sol in (("cross", cross), ("chiral", chiral)):
                self.artifacts.append(save_field_png(sol, self.path(config, f"{stem}.png"), half_width=15))

    def _fig7b(self, config, lat, p, png):
        J_eff = star_coupling(lat, p["g"], p["star_n"], p["n_k"])
        base = EntangleSetup(p["n_spokes"], J_eff)
        t_grid = np.linspace(0.0, 1.25 * max(2 * base.t_analytic, base.tau_quarter), p["n_t"])
        for ratio in p["gamma_ratios"]:
            setup = EntangleSetup(p["n_spokes"], J_eff, ratio * abs(J_eff), t_grid)
            write_entangle(self, config, setup, stem=f"fidelity_gamma_{ratio:g}")
