"""Heightfield environments: flat ground, sine bumps, and an asymmetric valley.

All dimensions are config parameters with documented defaults (the source
shapes are qualitative). The valley floor is bounded by a 45-degree wall on
the -y side and a vertical wall on the +y side; the vertical wall is modeled
as an impassable plane, so height_at reports a large sentinel beyond it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

GROUND = "ground"
SINE = "sine"
VALLEY = "valley"
KINDS = (GROUND, SINE, VALLEY)

WALL_SENTINEL = 1e6  # cm, reported beyond the valley's vertical wall

DEFAULT_BOUNDS = (-20.0, 300.0, -60.0, 60.0)  # x_min, x_max, y_min, y_max (cm)


class TerrainBoundsError(ValueError):
    """Signals a height query outside the terrain rectangle."""


@dataclass(frozen=True)
class Terrain:
    kind: str
    amplitude: float = 2.0  # cm (sine)
    wavelength: float = 30.0  # cm (sine)
    floor_width: float = 20.0  # cm (valley floor, wall to wall)
    bounds: tuple[float, float, float, float] = DEFAULT_BOUNDS

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown terrain kind: {self.kind!r}")


def height_at(t: Terrain, x: float, y: float) -> float:
    if not in_bounds(t, x, y):
        raise TerrainBoundsError(f"({x}, {y}) outside bounds {t.bounds}")
    if t.kind == GROUND:
        return 0.0
    if t.kind == SINE:
        return t.amplitude * math.sin(2.0 * math.pi * x / t.wavelength)
    half = t.floor_width / 2.0
    if y > half:
        return WALL_SENTINEL
    if y < -half:
        return -y - half  # 45-degree rise
    return 0.0


def in_bounds(t: Terrain, x: float, y: float) -> bool:
    x_min, x_max, y_min, y_max = t.bounds
    return x_min <= x <= x_max and y_min <= y <= y_max


def make_terrain(name: str) -> Terrain:
    """Terrain presets by name; "training" is a gentler sine used only by the
    study session flow so that training happens off the three task terrains."""
    if name == "training":
        return Terrain(SINE, amplitude=1.0, wavelength=45.0)
    return Terrain(name)


def terrain_record(t: Terrain) -> dict:
    return {
        "kind": t.kind,
        "amplitude": t.amplitude,
        "wavelength": t.wavelength,
        "floor_width": t.floor_width,
        "bounds": list(t.bounds),
    }


def load_terrain_config(path: str, kind: str | None = None) -> Terrain:
    with open(path, encoding="utf-8") as f:
        cfg = json.load(f)
    return Terrain(
        kind=kind or cfg["kind"],
        amplitude=float(cfg.get("amplitude", 2.0)),
        wavelength=float(cfg.get("wavelength", 30.0)),
        floor_width=float(cfg.get("floor_width", 20.0)),
        bounds=tuple(cfg.get("bounds", DEFAULT_BOUNDS)),
    )
