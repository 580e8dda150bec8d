"""
Figure targets for ``reproduce-figure``.

Each entry fixes the physical parameters of one figure; the runner in
src.commands.figure_command turns it into CSV/JSON artifacts.
"""
from src.errors import ConfigError

FIGURE_POOL = [
    {
        "name": "fig1b",
        "description": "hybridized bands and density of states, middle gap 2G",
        "lattice": {"Lx": 41, "Ly": 41, "J": 1.0, "eta": -1.0, "G": 0.25},
        "params": {"n_k": 256, "n_bins": 400},
    },
    {
        "name": "fig2",
        "description": "odd-neighbour bound state of a small atom, clean and with off-diagonal disorder",
        "lattice": {"Lx": 41, "Ly": 41, "J": 1.0, "eta": -1.0, "G": 0.25},
        "params": {"g": 0.1, "seed": 2023, "W_intra": 0.25, "W_inter": 0.0625},
    },
    {
        "name": "fig3",
        "description": "giant atoms on (0,0)/(1,1) and on the four diagonal neighbours",
        "lattice": {"Lx": 41, "Ly": 41, "J": 1.0, "eta": -1.0, "G": 0.25},
        "params": {"g": 0.1, "n_k": 256},
    },
    {
        "name": "fig4d",
        "description": "spin-model spectrum of 144 emitters in a 35x35 bilayer with edge/corner labels",
        "lattice": {"Lx": 35, "Ly": 35, "J": 1.0, "eta": -1.0, "G": 4.0},
        "params": {"g": 0.1, "n_cells": 6, "intra": 4, "inter": 2, "n_k": 128},
    },
    {
        "name": "fig4e",
        "description": "an edge mode of the dimerized spin array",
        "lattice": {"Lx": 35, "Ly": 35, "J": 1.0, "eta": -1.0, "G": 4.0},
        "params": {"g": 0.1, "n_cells": 6, "intra": 4, "inter": 2, "n_k": 128, "mode": "edge"},
    },
    {
        "name": "fig4f",
        "description": "a corner mode of the dimerized spin array",
        "lattice": {"Lx": 35, "Ly": 35, "J": 1.0, "eta": -1.0, "G": 4.0},
        "params": {"g": 0.1, "n_cells": 6, "intra": 4, "inter": 2, "n_k": 128, "mode": "corner"},
    },
    {
        "name": "fig5",
        "description": "eta = -4 bands, density of states and disordered bound states at Delta = 0 and 0.5",
        "lattice": {"Lx": 41, "Ly": 41, "J": 1.0, "eta": -4.0, "G": 1.0},
        "params": {"g": 0.1, "n_k": 256, "n_bins": 400, "seed": 7, "W_intra": 0.05, "W_inter": 0.05, "deltas": [0.0, 0.5]},
    },
    {
        "name": "fig6",
        "description": "photon trapping by four points and the two-layer chiral pair with its phase jump",
        "lattice": {"Lx": 41, "Ly": 41, "J": 1.0, "eta": -1.0, "G": 0.25},
        "params": {"g": 0.1, "n_k": 256, "span": 15},
    },
    {
        "name": "fig7b",
        "description": "fidelity of the eight-spoke W state, lossless and with emitter decay",
        "lattice": {"Lx": 41, "Ly": 41, "J": 1.0, "eta": -1.0, "G": 0.25},
        "params": {"g": 0.1, "n_k": 256, "star_n": 2, "n_spokes": 8, "gamma_ratios": [0.0, 0.01], "n_t": 401},
    },
]


def figure_names():
    return [f["name"] for f in FIGURE_POOL]


def get_figure(name):
    for fig in FIGURE_POOL:
        if fig["name"] == name:
            return fig
    raise ConfigError(f"unknown figure target {name!r}; choose from {', '.join(figure_names())}")
