"""
Emitter descriptions and the bound-state container shared by the small-atom
and giant-atom solvers.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from src.errors import ConfigError


@dataclass(frozen=True)
class CouplingPoint:
    """One coupling point: layer (1 or 2), site offset (n_x, n_y), signed strength g."""

    layer: int
    n_x: int
    n_y: int
    g: float

    def __post_init__(self):
        if self.layer not in (1, 2):
            raise ConfigError(f"coupling layer must be 1 or 2, got {self.layer}")

    @property
    def site(self):
        return (self.n_x, self.n_y)

    def lambda_parity(self):
        """0 if the point sits on the chiral sublattice of a layer-1 site at the origin, else 1."""
        return (self.n_x + self.n_y + (self.layer - 1)) % 2


@dataclass(frozen=True)
class EmitterConfig:
    delta: float
    points: tuple

    def __post_init__(self):
        pts = tuple(p if isinstance(p, CouplingPoint) else CouplingPoint(*p) for p in self.points)
        if not pts:
            raise ConfigError("an emitter needs at least one coupling point")
        object.__setattr__(self, "points", pts)

    @classmethod
    def small(cls, delta=0.0, g=0.1, layer=1, site=(0, 0)):
        return cls(delta, (CouplingPoint(layer, site[0], site[1], g),))

    @property
    def is_small(self):
        return len(self.points) == 1

    def is_parity_preserving(self):
        """True when all points share one chiral sublattice (mutually even-neighbour)."""
        return len({p.lambda_parity() for p in self.points}) == 1

    def to_dict(self):
        return {
            "delta": self.delta,
            "points": [{"layer": p.layer, "nx": p.n_x, "ny": p.n_y, "g": p.g} for p in self.points],
        }

    @classmethod
    def from_dict(cls, data):
        points = tuple(CouplingPoint(int(p["layer"]), int(p["nx"]), int(p["ny"]), float(p["g"])) for p in data["points"])
        return cls(float(data.get("delta", 0.0)), points)


@dataclass(eq=False)
class BoundStateSolution:
    """
    Emitter-photon bound state.

    field_a1/field_a2 are complex arrays indexed [i_y, i_x]; origin holds the
    array index (i_x, i_y) of the relative site n = (0, 0).
    """

    energy: float
    c_e: float
    field_a1: np.ndarray
    field_a2: np.ndarray
    method: str
    origin: tuple
    params: dict = field(default_factory=dict)
    contributions: list = field(default_factory=list)

    def offsets(self):
        ny, nx = self.field_a1.shape
        dy, dx = np.meshgrid(np.arange(ny) - self.origin[1], np.arange(nx) - self.origin[0], indexing="ij")
        return dx, dy

    def field(self, layer):
        return self.field_a1 if layer == 1 else self.field_a2

    def amplitude(self, layer, n_x, n_y):
        i_x = self.origin[0] + n_x
        i_y = self.origin[1] + n_y
        arr = self.field(layer)
        if not (0 <= i_y < arr.shape[0] and 0 <= i_x < arr.shape[1]):
            raise IndexError(f"site ({n_x}, {n_y}) outside the stored field")
        return arr[i_y, i_x]

    def window(self, layer, half_width):
        """Sub-array of sites with |n_x|, |n_y| <= half_width."""
        x0, y0 = self.origin
        return self.field(layer)[y0 - half_width : y0 + half_width + 1, x0 - half_width : x0 + half_width + 1]

    def photonic_norm(self):
        return float(np.sum(np.abs(self.field_a1) ** 2) + np.sum(np.abs(self.field_a2) ** 2))

    def rows(self):
        """(layer, n_x, n_y, re, im) rows, layer slowest then n_y then n_x."""
        dx, dy = self.offsets()
        for layer, arr in ((1, self.field_a1), (2, self.field_a2)):
            for x, y, v in zip(dx.ravel(), dy.ravel(), arr.ravel()):
                yield layer, int(x), int(y), float(v.real), float(v.imag)

    def sidecar(self):
        return {"E_BS": self.energy, "c_e": self.c_e, "method": self.method, "params": self.params}

    def sidecar_json(self):
        return json.dumps(self.sidecar(), sort_keys=True, indent=2)


def parity_masks(sol):
    """Boolean masks (layer 1, layer 2) of the 'odd' chiral sublattice relative to the origin."""
    dx, dy = sol.offsets()
    odd1 = (dx + dy) % 2 == 1
    return odd1, ~odd1


def parity_norms(sol):
    """
    Photonic norm on the odd and even sublattices.

    A layer-1 site has the parity of n_x + n_y; a layer-2 site the opposite
    parity, so each class is one sublattice of the chiral operator.
    """
    odd1, odd2 = parity_masks(sol)
    a1 = np.abs(sol.field_a1) ** 2
    a2 = np.abs(sol.field_a2) ** 2
    odd = float(np.sum(a1[odd1]) + np.sum(a2[odd2]))
    even = float(np.sum(a1[~odd1]) + np.sum(a2[~odd2]))
    return odd, even
