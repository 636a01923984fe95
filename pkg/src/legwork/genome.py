"""Robot genome: allele ranges, validation, sampling, variation, descriptors.

A genome directly parameterizes a 2-6 legged robot: a body prism chosen from
six aspect-ratio presets and scaled per axis, plus a variable-length list of
legs, each with 2 or 3 links drawn from seven link presets with a scalable
length axis. All operators are pure functions of their inputs and an explicit
numpy Generator, so everything downstream is replayable from a seed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

# Catalog dimensions in cm, keyed by shape id. The Z column of the link
# catalog is the length axis and is the only axis touched by length_scale.
BODY_SHAPES = {
    1: (10.0, 10.0, 4.0),
    2: (15.0, 10.0, 4.0),
    3: (20.0, 10.0, 4.0),
    4: (10.0, 5.0, 4.0),
    5: (15.0, 5.0, 4.0),
    6: (7.0, 5.0, 4.0),
}
LINK_SHAPES = {
    1: (1.0, 1.0, 4.0),
    2: (4.0, 1.0, 4.0),
    3: (1.0, 4.0, 4.0),
    4: (1.0, 4.0, 2.0),
    5: (1.0, 4.0, 7.0),
    6: (1.0, 1.0, 7.0),
    7: (1.0, 1.0, 10.0),
}

SCALE_MIN = 0.5
SCALE_MAX = 1.5
MIN_LEGS = 2
MAX_LEGS = 6
MIN_LINKS = 2
MAX_LINKS = 3

# Feature-map extremes implied by the catalogs: body X in [7*0.5, 20*1.5],
# leg length in [2*2*0.5, 3*10*1.5] so a 2-leg {2, 45} robot has std 21.5.
BODY_LENGTH_RANGE = (3.5, 30.0)
LEG_STD_RANGE = (0.0, 21.5)

# Real-gene mutation takes a clamped Cauchy step: heavy tails let single
# draws reach the range bounds (the clamp piles mass exactly there), which the
# archive's extreme-spread cells need, while the sharp center still refines.
CAUCHY_SCALE = 0.3 * (SCALE_MAX - SCALE_MIN)


@dataclass(frozen=True)
class LinkGenome:
    shape_id: int
    length_scale: float


@dataclass(frozen=True)
class LegGenome:
    links: tuple[LinkGenome, ...]


@dataclass(frozen=True)
class Genome:
    body_shape_id: int
    body_scale: tuple[float, float, float]
    num_legs: int
    layout_mirror: bool
    legs: tuple[LegGenome, ...]


@dataclass(frozen=True)
class FeatureDescriptor:
    body_length_x: float  # cm
    leg_length_std: float  # cm


class GenomeError(ValueError):
    """Raised when an operation is handed a genome that fails validation."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


def validate(g: Genome) -> list[str]:
    """Return every range/shape violation; an empty list means valid."""
    out: list[str] = []
    if g.body_shape_id not in BODY_SHAPES:
        out.append(f"body_shape_id out of 1-6: {g.body_shape_id}")
    if len(g.body_scale) != 3:
        out.append(f"body_scale must have 3 components, got {len(g.body_scale)}")
    for axis, s in zip("xyz", g.body_scale):
        if not (SCALE_MIN <= s <= SCALE_MAX):
            out.append(f"body_scale.{axis} out of [0.5, 1.5]: {s}")
    if not (MIN_LEGS <= g.num_legs <= MAX_LEGS):
        out.append(f"num_legs out of 2-6: {g.num_legs}")
    if len(g.legs) != g.num_legs:
        out.append(f"legs length mismatch: num_legs={g.num_legs}, got {len(g.legs)} entries")
    for i, leg in enumerate(g.legs):
        if not (MIN_LINKS <= len(leg.links) <= MAX_LINKS):
            out.append(f"leg {i}: link count out of 2-3: {len(leg.links)}")
        for j, link in enumerate(leg.links):
            if link.shape_id not in LINK_SHAPES:
                out.append(f"leg {i} link {j}: shape_id out of 1-7: {link.shape_id}")
            if not (SCALE_MIN <= link.length_scale <= SCALE_MAX):
                out.append(f"leg {i} link {j}: length_scale out of [0.5, 1.5]: {link.length_scale}")
    return out


def check_valid(g: Genome) -> Genome:
    violations = validate(g)
    if violations:
        raise GenomeError(violations)
    return g


def neutral_genome() -> Genome:
    """Every control at the middle of its range; integer middles round down."""
    leg = LegGenome(links=(LinkGenome(4, 1.0), LinkGenome(4, 1.0)))
    return Genome(
        body_shape_id=3,
        body_scale=(1.0, 1.0, 1.0),
        num_legs=4,
        layout_mirror=False,
        legs=(leg, leg, leg, leg),
    )


def random_genome(rng: np.random.Generator) -> Genome:
    body_shape = int(rng.integers(1, 7))
    scale = (
        float(rng.uniform(SCALE_MIN, SCALE_MAX)),
        float(rng.uniform(SCALE_MIN, SCALE_MAX)),
        float(rng.uniform(SCALE_MIN, SCALE_MAX)),
    )
    num_legs = int(rng.integers(MIN_LEGS, MAX_LEGS + 1))
    mirror_flag = bool(rng.random() < 0.5)
    legs = tuple(_random_leg(rng) for _ in range(num_legs))
    return Genome(body_shape, scale, num_legs, mirror_flag, legs)


def _random_leg(rng: np.random.Generator) -> LegGenome:
    n = int(rng.integers(MIN_LINKS, MAX_LINKS + 1))
    return LegGenome(links=tuple(_random_link(rng) for _ in range(n)))


def _random_link(rng: np.random.Generator) -> LinkGenome:
    return LinkGenome(int(rng.integers(1, 8)), float(rng.uniform(SCALE_MIN, SCALE_MAX)))


def _perturb(value: float, rng: np.random.Generator) -> float:
    jump = CAUCHY_SCALE * math.tan(math.pi * (float(rng.random()) - 0.5))
    return min(max(value + jump, SCALE_MIN), SCALE_MAX)


def mutate(g: Genome, rate: float, rng: np.random.Generator) -> Genome:
    """Per-gene mutation at probability `rate`: integers/booleans resample
    their full range, reals take a clamped Cauchy step.

    Structural genes resize in place: a num_legs change appends copies of the
    last leg (which then go through the same per-gene pass) or drops legs from
    the tail; a link-count change appends a copy of the leg's last link or
    drops the last link. Each leg also carries a rescale macro-gene that sets
    all its link scales to one draw around their mean, so a single event can
    move a whole leg's length across its range.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"mutation rate out of [0, 1]: {rate}")

    def hit() -> bool:
        return float(rng.random()) < rate

    body_shape = int(rng.integers(1, 7)) if hit() else g.body_shape_id
    scale = tuple(_perturb(s, rng) if hit() else s for s in g.body_scale)

    num_legs = int(rng.integers(MIN_LEGS, MAX_LEGS + 1)) if hit() else g.num_legs
    legs = list(g.legs)
    while len(legs) < num_legs:
        legs.append(legs[-1])
    del legs[num_legs:]

    mirror_flag = bool(rng.random() < 0.5) if hit() else g.layout_mirror

    new_legs = []
    for leg in legs:
        links = list(leg.links)
        if hit():
            mean_scale = sum(l.length_scale for l in links) / len(links)
            rescaled = _perturb(mean_scale, rng)
            links = [LinkGenome(l.shape_id, rescaled) for l in links]
        if hit():
            n = int(rng.integers(MIN_LINKS, MAX_LINKS + 1))
            if n > len(links):
                links.append(links[-1])
            del links[n:]
        new_links = []
        for link in links:
            shape = int(rng.integers(1, 8)) if hit() else link.shape_id
            ls = _perturb(link.length_scale, rng) if hit() else link.length_scale
            new_links.append(LinkGenome(shape, ls))
        new_legs.append(LegGenome(tuple(new_links)))

    return Genome(body_shape, scale, num_legs, mirror_flag, tuple(new_legs))


def crossover(a: Genome, b: Genome, rng: np.random.Generator) -> Genome:
    """Structural leg-aligned uniform crossover.

    num_legs and layout_mirror come together from one fair-coin parent; body
    genes cross gene-wise; leg i is taken whole from either parent's leg i
    where both have one, else from the parent that has it.
    """
    structure = a if rng.random() < 0.5 else b
    num_legs = structure.num_legs
    mirror_flag = structure.layout_mirror

    body_shape = a.body_shape_id if rng.random() < 0.5 else b.body_shape_id
    scale = tuple(
        a.body_scale[i] if rng.random() < 0.5 else b.body_scale[i] for i in range(3)
    )

    legs = []
    for i in range(num_legs):
        if i < a.num_legs and i < b.num_legs:
            legs.append(a.legs[i] if rng.random() < 0.5 else b.legs[i])
        elif i < a.num_legs:
            legs.append(a.legs[i])
        else:
            legs.append(b.legs[i])

    return Genome(body_shape, scale, num_legs, mirror_flag, tuple(legs))


def leg_length(leg: LegGenome) -> float:
    """Scaled length axis summed over the leg's links, in cm."""
    return sum(LINK_SHAPES[l.shape_id][2] * l.length_scale for l in leg.links)


def features(g: Genome) -> FeatureDescriptor:
    # sorted so the std is exactly invariant under leg reordering (mirror)
    lengths = sorted(leg_length(leg) for leg in g.legs)
    mean = sum(lengths) / len(lengths)
    var = sum((x - mean) ** 2 for x in lengths) / len(lengths)
    return FeatureDescriptor(
        body_length_x=BODY_SHAPES[g.body_shape_id][0] * g.body_scale[0],
        leg_length_std=math.sqrt(var),
    )


def left_count(num_legs: int, layout_mirror: bool) -> int:
    """Legs on the left side; layout_mirror picks the extra-leg side when odd."""
    return (num_legs + 1) // 2 if layout_mirror else num_legs // 2


def side_split(g: Genome) -> tuple[tuple[LegGenome, ...], tuple[LegGenome, ...]]:
    """(left, right) leg sub-lists, each front to back."""
    nl = left_count(g.num_legs, g.layout_mirror)
    return g.legs[:nl], g.legs[nl:]


def mirror(g: Genome) -> Genome:
    """Swap the left and right leg sub-lists; flip layout_mirror when odd.

    An involution that preserves features; the phenotype of the result is the
    xz-plane reflection of the original.
    """
    left, right = side_split(g)
    flag = (not g.layout_mirror) if g.num_legs % 2 else g.layout_mirror
    return Genome(g.body_shape_id, g.body_scale, g.num_legs, flag, right + left)


def _leg_key(leg: LegGenome) -> tuple:
    return tuple((l.shape_id, l.length_scale) for l in leg.links)


def grouping_reflected(g: Genome) -> bool:
    """True when the gait-group perimeter should start front-right.

    The orientation is canonical on genome content (the lexicographically
    smaller leg sub-list anchors the group-1 corner), which makes it flip
    under mirror() and keeps each leg's gait phase at its mirrored position.
    """
    left, right = side_split(g)
    return tuple(map(_leg_key, right)) < tuple(map(_leg_key, left))


# Canonical design-record encoding (UTF-8 JSON), field names fixed.

def to_record(g: Genome, **meta) -> dict:
    rec = {
        "body_shape_id": g.body_shape_id,
        "body_scale": list(g.body_scale),
        "num_legs": g.num_legs,
        "layout_mirror": g.layout_mirror,
        "legs": [
            [{"shape_id": l.shape_id, "length_scale": l.length_scale} for l in leg.links]
            for leg in g.legs
        ],
    }
    for key in ("user_id", "environment", "iteration", "recorded_fitness"):
        if key in meta and meta[key] is not None:
            rec[key] = meta[key]
    return rec


def from_record(rec: dict) -> Genome:
    legs = tuple(
        LegGenome(tuple(LinkGenome(int(l["shape_id"]), float(l["length_scale"])) for l in leg))
        for leg in rec["legs"]
    )
    return Genome(
        body_shape_id=int(rec["body_shape_id"]),
        body_scale=tuple(float(s) for s in rec["body_scale"]),
        num_legs=int(rec["num_legs"]),
        layout_mirror=bool(rec["layout_mirror"]),
        legs=legs,
    )


def to_json(g: Genome, **meta) -> str:
    return json.dumps(to_record(g, **meta), separators=(",", ":"))


def from_json(text: str) -> Genome:
    return from_record(json.loads(text))
