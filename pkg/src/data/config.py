"""
Run configuration: pydantic models, validation and command-line overrides.

A config file is a JSON object with the blocks below; every block is
optional and unknown keys are rejected. Command-line flags override file
values through OVERRIDES.
"""
import json
import logging
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.errors import ConfigError
from src.lattice.bilayer import BilayerLattice, DisorderRealization
from src.emitters.emitter import EmitterConfig

logger = logging.getLogger(__name__)

COMMANDS = (
    "bands",
    "dos",
    "boundstate",
    "giant",
    "spinmodel",
    "ssh-spectrum",
    "polarization",
    "entangle",
    "reproduce-figure",
)
# commands that only need the band structure, so G = 0 is allowed
GAPLESS_OK = ("bands", "dos")


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


class LatticeModel(_Block):
    Lx: int = Field(41, ge=3)
    Ly: int = Field(41, ge=3)
    J: float = 1.0
    eta: float = Field(-1.0, lt=0)
    G: float = Field(0.25, ge=0)
    boundary: Literal["open", "periodic"] = "open"

    def build(self):
        return BilayerLattice.from_dict(self.model_dump())


class DisorderModel(_Block):
    seed: int = Field(0, ge=0)
    n_seeds: int = Field(0, ge=0)
    W_intra: float = Field(0.0, ge=0)
    W_inter: float = Field(0.0, ge=0)
    W_onsite: float = Field(0.0, ge=0)

    @property
    def active(self):
        return self.W_intra > 0 or self.W_inter > 0 or self.W_onsite > 0

    def build(self, lat, seed=None):
        if not self.active:
            return None
        return DisorderRealization.generate(
            lat, self.seed if seed is None else seed, self.W_intra, self.W_inter, self.W_onsite
        )


class PointModel(_Block):
    layer: Literal[1, 2] = 1
    nx: int = 0
    ny: int = 0
    g: float = 0.1


class EmitterModel(_Block):
    delta: float = 0.0
    g: float = 0.1
    layer: Literal[1, 2] = 1
    points: Optional[List[PointModel]] = None
    preset: Optional[Literal["pair", "cross", "diagonal", "chiral"]] = None
    allow_parity_violation: bool = False

    def build(self):
        if self.points:
            return EmitterConfig.from_dict({"delta": self.delta, "points": [p.model_dump() for p in self.points]})
        return EmitterConfig.small(self.delta, self.g, self.layer)


class SpinGeometryModel(_Block):
    kind: Literal["half-filled", "ssh", "file"] = "ssh"
    size: int = Field(6, ge=2)
    n_cells: int = Field(6, ge=2)
    intra: int = Field(4, ge=2)
    inter: int = Field(2, ge=2)
    path: Optional[str] = None
    g: float = Field(0.1, gt=0)

    @model_validator(mode="after")
    def _needs_path(self):
        if self.kind == "file" and not self.path:
            raise ValueError("kind 'file' needs a path")
        return self


class NumericsModel(_Block):
    n_k: int = Field(128, gt=0)
    n_bins: int = Field(200, gt=0)
    n_eigs: int = Field(24, gt=0)
    method: Literal["quadrature", "exact_diag"] = "quadrature"
    zero_window: float = Field(1e-4, gt=0)
    wilson_nk: int = Field(64, gt=1)
    n_spokes: int = Field(8, ge=1)
    J_eff: Optional[float] = None
    Gamma: float = Field(0.0, ge=0)
    star_n: int = Field(2, ge=1)
    n_t: int = Field(401, ge=2)
    threads: int = Field(1, ge=1)


class RunConfig(_Block):
    command: Literal[COMMANDS] = "bands"
    lattice: LatticeModel = Field(default_factory=LatticeModel)
    disorder: DisorderModel = Field(default_factory=DisorderModel)
    emitter: EmitterModel = Field(default_factory=EmitterModel)
    spins: SpinGeometryModel = Field(default_factory=SpinGeometryModel)
    numerics: NumericsModel = Field(default_factory=NumericsModel)
    target: Optional[str] = None
    out: str = "runs/out"

    @model_validator(mode="after")
    def _gap_needed(self):
        if self.command not in GAPLESS_OK and self.lattice.G <= 0:
            raise ValueError(f"command '{self.command}' needs a middle gap, i.e. G > 0")
        return self

    def canonical(self):
        return json.dumps(self.model_dump(mode="json"), sort_keys=True)


# flag name -> (block, key); flags mirror config keys
OVERRIDES = {
    "Lx": ("lattice", "Lx"),
    "Ly": ("lattice", "Ly"),
    "J": ("lattice", "J"),
    "eta": ("lattice", "eta"),
    "G": ("lattice", "G"),
    "boundary": ("lattice", "boundary"),
    "seed": ("disorder", "seed"),
    "n_seeds": ("disorder", "n_seeds"),
    "W_intra": ("disorder", "W_intra"),
    "W_inter": ("disorder", "W_inter"),
    "W_onsite": ("disorder", "W_onsite"),
    "delta": ("emitter", "delta"),
    "g": ("emitter", "g"),
    "layer": ("emitter", "layer"),
    "preset": ("emitter", "preset"),
    "geometry": ("spins", "kind"),
    "size": ("spins", "size"),
    "n_cells": ("spins", "n_cells"),
    "intra": ("spins", "intra"),
    "inter": ("spins", "inter"),
    "geometry_file": ("spins", "path"),
    "spin_g": ("spins", "g"),
    "nk": ("numerics", "n_k"),
    "bins": ("numerics", "n_bins"),
    "n_eigs": ("numerics", "n_eigs"),
    "method": ("numerics", "method"),
    "zero_window": ("numerics", "zero_window"),
    "wilson_nk": ("numerics", "wilson_nk"),
    "n_spokes": ("numerics", "n_spokes"),
    "J_eff": ("numerics", "J_eff"),
    "Gamma": ("numerics", "Gamma"),
    "star_n": ("numerics", "star_n"),
    "n_t": ("numerics", "n_t"),
    "threads": ("numerics", "threads"),
}


def _pointer(loc):
    return "/" + "/".join(str(part) for part in loc)


def _validated(data):
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        paths = [_pointer(e["loc"]) for e in exc.errors()]
        detail = "; ".join(f"{_pointer(e['loc'])}: {e['msg']}" for e in exc.errors())
        raise ConfigError(f"invalid config: {detail}", paths=paths) from None


def load_config_file(path):
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def validate_config(path):
    """Schema-validated RunConfig from a JSON file, with its canonical echo."""
    config = _validated(load_config_file(path))
    return config, config.canonical()


def build_config(command, path=None, overrides=None, **extra):
    """RunConfig for one command from an optional file plus flag overrides."""
    data = load_config_file(path) if path else {}
    data["command"] = command
    for flag, value in (overrides or {}).items():
        if value is None:
            continue
        block, key = OVERRIDES[flag]
        data.setdefault(block, {})[key] = value
    for key, value in extra.items():
        if value is not None:
            data[key] = value
    config = _validated(data)
    logger.debug("config: %s", config.canonical())
    return config


def schema():
    return RunConfig.model_json_schema()
