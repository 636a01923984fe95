#!/usr/bin/env python3
"""Illuminate the feature map from a random start and print its shape.

Runs a short MAP-Elites search on flat ground (a few hundred iterations is
enough to see the map fill) and renders the archive as ASCII: one character
per cell, darker meaning fitter.
"""
import numpy as np

from legwork.evolution import COLS, ROWS, RunConfig, run
from legwork.runner import make_evaluator
from legwork.terrain import make_terrain

ITERATIONS = 150

cfg = RunConfig(environment="ground", iterations=ITERATIONS, seed=7)
log = run(cfg, [], make_evaluator(make_terrain("ground")))

for it in (0, 10, 50, 100, ITERATIONS):
    r = log.records[it]
    print(
        f"iter {it:>4}: coverage {r.coverage:5.1%}  mean {r.mean_fitness:7.2f}  "
        f"best {r.best_fitness:7.2f}  qd {r.qd_score:9.1f}"
    )

grid = log.archive.fitness_grid()
lo = np.nanmin(grid)
hi = np.nanmax(grid)
shades = " .:-=+*#%@"
print("\narchive (rows: body length 3.5..30 cm, cols: leg spread 0..21.5 cm)")
for r in range(ROWS):
    line = ""
    for c in range(COLS):
        v = grid[r, c]
        if np.isnan(v):
            line += " "
        else:
            line += shades[min(9, int((v - lo) / (hi - lo + 1e-9) * 10))]
    print("|" + line + "|")
print(f"shade scale: {lo:.1f} (light) .. {hi:.1f} (dark)")
