#!/usr/bin/env python3
"""Build a robot by hand and watch the numbers: genome -> phenotype -> gait.

The neutral design sits at the middle of every range: a 20x10x4 cm body on
four 4 cm legs. We validate it, inspect the compiled morphology, then walk it
over each terrain and print where it ends up.
"""
import numpy as np

from legwork import (
    Genome,
    LegGenome,
    LinkGenome,
    build_phenotype,
    features,
    make_terrain,
    neutral_genome,
    simulate,
    validate,
)
from legwork.morphology import leg_lengths, total_mass

robot = neutral_genome()
print("violations:", validate(robot) or "none")
print("features:", features(robot))

body = build_phenotype(robot)
print(f"body {body.body_dims} cm, {body.body_mass:.0f} g, total {total_mass(body):.0f} g")
print("leg lengths (perimeter order):", leg_lengths(body))

for env in ("ground", "sine", "valley"):
    result = simulate(robot, make_terrain(env))
    print(
        f"{env:>7}: fitness {result.fitness:7.2f}  dx {result.dx:7.2f}  "
        f"dy {result.dy:8.4f}  fell={result.fell_off}"
    )

# a lopsided design: one stubby leg, one stilt, and a long body
lopsided = Genome(
    body_shape_id=3,
    body_scale=(1.5, 1.0, 1.0),
    num_legs=2,
    layout_mirror=False,
    legs=(
        LegGenome((LinkGenome(4, 0.5), LinkGenome(4, 0.5))),
        LegGenome((LinkGenome(7, 1.5), LinkGenome(7, 1.5), LinkGenome(7, 1.5))),
    ),
)
print("\nlopsided features:", features(lopsided))
result = simulate(lopsided, make_terrain("ground"))
print(f"lopsided on ground: fitness {result.fitness:.2f}, dy drift {result.dy:.2f} cm")
