"""Compile a genome into a concrete phenotype: dimensions, masses, frames.

Legs live on the body's two y-side faces, evenly spaced along x (fractions
(i+0.5)/k of the extent, front to back) and attached at the z-midpoint of the
face. All joints are revolute about axes parallel to body y. The phenotype
lists legs in perimeter order: front-left, then clockwise seen from above
(front-right, down the right side, rear-left, back up the left side).
"""
from __future__ import annotations

from dataclasses import dataclass

from .genome import (
    BODY_SHAPES,
    LINK_SHAPES,
    Genome,
    check_valid,
    left_count,
)

DENSITY = 2.5  # g/cm^3, uniform over all parts


@dataclass(frozen=True)
class LinkPhenotype:
    dims: tuple[float, float, float]  # cm; Z is the scaled length axis
    mass: float  # g


@dataclass(frozen=True)
class LegPhenotype:
    genome_index: int
    side: str  # "left" | "right"
    attach: tuple[float, float, float]  # cm, body frame
    links: tuple[LinkPhenotype, ...]
    length: float  # cm, sum of scaled link lengths


@dataclass(frozen=True)
class Morphology:
    body_dims: tuple[float, float, float]  # cm
    body_mass: float  # g
    legs: tuple[LegPhenotype, ...]  # perimeter order


def perimeter_order(num_legs: int, layout_mirror: bool, reflected: bool = False) -> list[int]:
    """Genome leg indices in perimeter order.

    Default orientation starts front-left and walks clockwise (viewed from
    above). The reflected orientation starts front-right and walks
    counter-clockwise; it is the mirror image of the default walk.
    """
    nl = left_count(num_legs, layout_mirror)
    left = list(range(nl))
    right = list(range(nl, num_legs))
    if not reflected:
        return left[:1] + right + left[:0:-1]
    return right[:1] + left + right[:0:-1]


def build_phenotype(g: Genome) -> Morphology:
    check_valid(g)
    bx, by, bz = (d * s for d, s in zip(BODY_SHAPES[g.body_shape_id], g.body_scale))
    body_mass = bx * by * bz * DENSITY

    nl = left_count(g.num_legs, g.layout_mirror)
    side_counts = {"left": nl, "right": g.num_legs - nl}
    side_seen = {"left": 0, "right": 0}

    by_index = {}
    for idx, leg in enumerate(g.legs):
        side = "left" if idx < nl else "right"
        i = side_seen[side]
        side_seen[side] += 1
        k = side_counts[side]
        # front = +x; i-th leg on a side sits (i+0.5)/k of the extent from the front
        ax = bx / 2 - (i + 0.5) / k * bx
        ay = by / 2 if side == "left" else -by / 2
        links = []
        total = 0.0
        for link in leg.links:
            lx, ly, lz = LINK_SHAPES[link.shape_id]
            lz = lz * link.length_scale
            links.append(LinkPhenotype((lx, ly, lz), lx * ly * lz * DENSITY))
            total += lz
        by_index[idx] = LegPhenotype(idx, side, (ax, ay, 0.0), tuple(links), total)

    order = perimeter_order(g.num_legs, g.layout_mirror)
    return Morphology((bx, by, bz), body_mass, tuple(by_index[i] for i in order))


def leg_lengths(m: Morphology) -> list[float]:
    """Per-leg scaled link length sums, perimeter order, cm."""
    return [leg.length for leg in m.legs]


def total_mass(m: Morphology) -> float:
    return m.body_mass + sum(l.mass for leg in m.legs for l in leg.links)


def phenotype_record(m: Morphology) -> dict:
    """Debug dump in the same structured-text shape as design records."""
    return {
        "body_dims": list(m.body_dims),
        "body_mass": m.body_mass,
        "legs": [
            {
                "genome_index": leg.genome_index,
                "side": leg.side,
                "attach": list(leg.attach),
                "length": leg.length,
                "links": [{"dims": list(l.dims), "mass": l.mass} for l in leg.links],
            }
            for leg in m.legs
        ],
    }
