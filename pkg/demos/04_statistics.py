#!/usr/bin/env python3
"""The statistics toolbox on its own: U tests, milestones, and map metrics.

No simulation here, just the analysis layer driven by synthetic numbers, so
it runs instantly.
"""
import numpy as np

from legwork.analysis import (
    mann_whitney_u,
    pairwise_comparison,
    reliability_precision,
)
from legwork.evolution import COLS, ROWS

# Exact Mann-Whitney on small samples (full enumeration under the hood)
a = [12.1, 14.3, 11.8, 15.0, 13.2]
b = [16.4, 15.9, 17.2, 16.8, 18.0]
out = mann_whitney_u(a, b)
print(f"U = {out['U']}, two-sided p = {out['p']:.5f}  (exact, n1+n2 <= 20)")

# Larger samples switch to the tie-corrected normal approximation
rng = np.random.default_rng(0)
x = list(rng.normal(0.0, 1.0, 40))
y = list(rng.normal(0.6, 1.0, 40))
print(f"normal-approximation p = {mann_whitney_u(x, y)['p']:.5f}")

# Condition-vs-condition cells: sign of the column mean, * marks p < 0.05
samples = {
    "h0": list(rng.normal(5.0, 0.4, 10)),
    "h15": list(rng.normal(5.6, 0.4, 10)),
    "h25": list(rng.normal(6.3, 0.4, 10)),
}
cells = pairwise_comparison(samples, ["h0", "h15", "h25"])
for pair, cell in cells.items():
    print(f"{pair[0]:>4} vs {pair[1]:<4}: {cell}")

# Reliability vs precision: normalize two runs by the best known per cell
g1 = rng.uniform(1.0, 10.0, (ROWS, COLS))
g2 = g1 * rng.uniform(0.7, 1.3, (ROWS, COLS))
for i, stats in enumerate(reliability_precision([g1, g2])):
    print(f"run {i}: reliability {stats['reliability']:.3f}, precision {stats['precision']:.3f}")
print("(identical at full coverage, by construction)")
