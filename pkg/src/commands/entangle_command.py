import logging

import numpy as np

from src.commands.bath_commands import LATTICE_FLAGS
from src.commands.command import Command
from src.dynamics.entangle import EntangleSetup, fidelity_at_optimal_time, lindblad_evolve, star_coupling

logger = logging.getLogger(__name__)


def entangle_setup(config, Gamma=None):
    """J_eff from the config, or from the bound-state profile of the star geometry."""
    num = config.numerics
    if num.J_eff is not None:
        J_eff = num.J_eff
    else:
        lat = config.lattice.build()
        J_eff = star_coupling(lat, config.emitter.g, num.star_n, num.n_k)
        logger.info("star coupling at n=%d: J_eff = %.6e", num.star_n, J_eff)
    base = EntangleSetup(num.n_spokes, J_eff)
    # cover both the two-level maximum and the quarter-period time
    t_max = 1.25 * max(2 * base.t_analytic, base.tau_quarter)
    gamma = num.Gamma if Gamma is None else Gamma
    return EntangleSetup(num.n_spokes, J_eff, gamma, np.linspace(0.0, t_max, num.n_t))


def write_entangle(command, config, setup, stem="entangle"):
    result = lindblad_evolve(setup)
    timing = fidelity_at_optimal_time(setup)
    command.csv(config, f"{stem}.csv", ("t", "fidelity", "excitation", "trace_dev"), result.rows())
    command.json(config, f"{stem}.json", {**timing.to_dict(), "params": setup.to_dict()})
    if abs(timing.t_analytic - timing.tau_quarter) > 1e-12 * timing.t_analytic:
        logger.info(
            "two-level time %.6g and quarter-period time %.6g differ; F = %.6f vs %.6f",
            timing.t_analytic,
            timing.tau_quarter,
            timing.F_analytic,
            timing.F_tau,
        )
    return result, timing


class EntangleCommand(Command):
    name = "entangle"
    help = "W-state preparation through a star of emitters, with emitter decay"
    flags = LATTICE_FLAGS + ("g", "nk", "n_spokes", "J_eff", "Gamma", "star_n", "n_t")

    def execute(self, config, args):
        write_entangle(self, config, entangle_setup(config))
