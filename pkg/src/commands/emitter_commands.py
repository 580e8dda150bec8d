import logging

from src.commands.bath_commands import LATTICE_FLAGS
from src.commands.command import Command
from src.emitters import giant_atom
from src.emitters.bound_state import solve_bound_state, zero_mode_ensemble
from src.emitters.emitter import parity_norms
from src.render.field_image import save_field_png

logger = logging.getLogger(__name__)

DISORDER_FLAGS = ("seed", "n_seeds", "W_intra", "W_inter", "W_onsite")
BRANCH_RAYS = {"pp": (1, 1), "pm": (1, -1), "mp": (-1, 1), "mm": (-1, -1)}
TRAP_WINDOW = 3


def bound_state_summary(sol):
    odd, even = parity_norms(sol)
    return {**sol.sidecar(), "odd_norm": odd, "even_norm": even, "photonic_norm": sol.photonic_norm()}


def giant_diagnostics(sol):
    out = {f"branch_{k}": giant_atom.branch_norm(sol, ray) for k, ray in BRANCH_RAYS.items()}
    out["outside_window_fraction"] = giant_atom.window_fraction(sol, TRAP_WINDOW)
    return out


def write_phase_profile(command, config, sol, stem="phase", span=15):
    rows = giant_atom.phase_profile(sol, offset=1, span=span)
    command.csv(
        config,
        f"{stem}.csv",
        ("n_x", "n_y", "amplitude", "delta_theta", "first", "second"),
        ((s[0], s[1], a, d, A, B) for s, a, d, A, B in rows),
    )
    return rows


class BoundStateCommand(Command):
    name = "boundstate"
    help = "single small-atom bound state (quadrature or exact diagonalization), optional disorder ensemble"
    flags = LATTICE_FLAGS + DISORDER_FLAGS + ("delta", "g", "layer", "nk", "method", "n_eigs", "threads")

    def execute(self, config, args):
        lat = config.lattice.build()
        emitter = config.emitter.build()
        method = config.numerics.method
        dis = config.disorder.build(lat)
        if dis is not None and method == "quadrature":
            logger.info("disorder given: switching to exact diagonalization")
            method = "exact_diag"
        sol = solve_bound_state(emitter, lat, method, config.numerics.n_k, dis, config.numerics.n_eigs)
        self.field(config, "field", sol)
        self.json(config, "boundstate.json", bound_state_summary(sol))
        if args.png:
            self.artifacts.append(save_field_png(sol, self.path(config, "field.png")))

        d = config.disorder
        if d.n_seeds > 0:
            seeds = list(range(d.seed, d.seed + d.n_seeds))
            runs = zero_mode_ensemble(emitter, lat, seeds, d.W_intra, d.W_inter, d.W_onsite)
            self.csv(
                config,
                "ensemble.csv",
                ("seed", "min_abs_E", "coupled_norm", "c_e"),
                ((r["seed"], r["min_abs_E"], r["coupled_norm"], r["c_e"]) for r in runs),
            )


class GiantCommand(Command):
    name = "giant"
    help = "giant-atom bound state from a preset or a list of coupling points"
    flags = LATTICE_FLAGS + ("delta", "g", "preset", "nk")

    def add_arguments(self, parser):
        parser.add_argument(
            "--allow-parity-violation",
            action="store_true",
            help="solve point sets that mix chiral sublattices",
        )

    def execute(self, config, args):
        lat = config.lattice.build()
        e = config.emitter
        if e.preset:
            emitter = giant_atom.preset(e.preset, e.g)
        else:
            emitter = e.build()
        allow = e.allow_parity_violation or args.allow_parity_violation
        sol = giant_atom.giant_bs_profile(emitter, lat, config.numerics.n_k, allow_parity_violation=allow)
        self.field(config, "field", sol)
        self.json(config, "giant.json", {**bound_state_summary(sol), **giant_diagnostics(sol)})
        if len(sol.contributions) == 2:
            rows = write_phase_profile(self, config, sol)
            logger.info("phase jumps along n_x = n_y + 1 at %s", giant_atom.phase_jumps(rows))
        if args.png:
            self.artifacts.append(save_field_png(sol, self.path(config, "field.png"), half_width=15))
