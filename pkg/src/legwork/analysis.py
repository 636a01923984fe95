"""Run metrics and experiment statistics.

Covers the per-archive scores (coverage, mean/best fitness, QD-score, elite
mean), cross-run normalized reliability/precision, milestone ("rate") lookups
over run logs, seed selection under per-user caps, and an exact-or-approximate
Mann-Whitney U test.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .genome import Genome

# QD-score clamps negative fitness to zero so the score is monotone under
# insertion; the walking objective can go negative.


def archive_stats(archive) -> dict:
    """coverage, mean/best fitness, QD-score, and elite mean (top 10% of
    occupied cells by fitness). Empty archive: NaN markers, zero coverage."""
    occ = archive.occupied()
    n_cells = len(archive.grid)
    if not occ:
        nan = float("nan")
        return {
            "coverage": 0.0,
            "mean_fitness": nan,
            "best_fitness": nan,
            "qd_score": 0.0,
            "elite_mean": nan,
        }
    fits = [ind.fitness for _, _, ind in occ]
    n_elite = math.ceil(0.1 * len(fits))
    elite = sorted(fits, reverse=True)[:n_elite]
    return {
        "coverage": len(fits) / n_cells,
        "mean_fitness": sum(fits) / len(fits),
        "best_fitness": max(fits),
        "qd_score": sum(max(0.0, f) for f in fits),
        "elite_mean": sum(elite) / len(elite),
    }


def reliability_precision(grids: list[np.ndarray]) -> list[dict]:
    """Per-run reliability and precision against the cross-run best per cell.

    `grids` holds one (rows, cols) fitness array per run, NaN where empty.
    Reliability averages cell/best over all cells (zero when the cell is
    empty, its fitness is negative, or the best-known is not positive);
    precision averages the same ratios over the run's occupied cells only, so
    the two are identical at full coverage and reliability never exceeds
    precision. Ratios clamp at zero like the QD-score, keeping the walking
    objective's negative values from inverting the normalization.
    """
    if not grids:
        raise ValueError("need at least one run")
    stack = np.stack(grids)
    # -inf marks never-occupied cells; the b > 0 guard zeroes them anyway
    best = np.max(np.where(np.isnan(stack), -np.inf, stack), axis=0)
    out = []
    for grid in grids:
        total = 0.0
        occ_total = 0.0
        occ_n = 0
        for r in range(grid.shape[0]):
            for c in range(grid.shape[1]):
                f = grid[r, c]
                if math.isnan(f):
                    continue
                b = best[r, c]
                ratio = f / b if b > 0 and f > 0 else 0.0
                total += ratio
                occ_total += ratio
                occ_n += 1
        n_cells = grid.shape[0] * grid.shape[1]
        out.append(
            {
                "reliability": total / n_cells,
                "precision": occ_total / occ_n if occ_n else float("nan"),
            }
        )
    return out


def _series(records, mode: str) -> list[tuple[int, float]]:
    key = {"mean": "mean_fitness", "elite": "elite_mean", "coverage": "coverage"}[mode]
    out = []
    for rec in records:
        if isinstance(rec, dict):
            out.append((rec["iteration"], rec[key]))
        else:
            out.append((rec.iteration, getattr(rec, key)))
    return out


def fitness_milestones(records, percents, mode: str = "mean") -> dict[float, int | None]:
    """First iteration (strictly after the initial dip) where the mean or
    elite-mean fitness reaches each percentage of its final value.

    The dip is the global minimum within the first 10% of iterations.
    Undefined (None) when the final value is not positive or a percentage is
    never reached.
    """
    series = _series(records, mode)
    final = series[-1][1]
    if not final > 0:
        return {p: None for p in percents}
    last_iter = series[-1][0]
    window_end = 0.1 * last_iter
    dip_iter = None
    dip_val = math.inf
    for it, v in series:
        if it > window_end:
            break
        if v < dip_val:
            dip_val = v
            dip_iter = it
    out: dict[float, int | None] = {}
    for p in percents:
        threshold = p / 100.0 * final
        hit = None
        for it, v in series:
            if it > dip_iter and v >= threshold:
                hit = it
                break
        out[p] = hit
    return out


def coverage_milestones(records, percents) -> dict[float, int | None]:
    """First iteration reaching each coverage percentage."""
    series = _series(records, "coverage")
    out: dict[float, int | None] = {}
    for p in percents:
        hit = None
        for it, v in series:
            if v >= p / 100.0:
                hit = it
                break
        out[p] = hit
    return out


@dataclass(frozen=True)
class SeedRecord:
    user_id: str
    environment: str
    iteration: int
    genome: Genome
    recorded_fitness: float


class SeedSelectionError(ValueError):
    pass


def dedup_pool(records: list[SeedRecord]) -> list[SeedRecord]:
    """Drop consecutive duplicate genomes within each user+environment stream
    (repeated simulation requests for the same design)."""
    last: dict[tuple[str, str], Genome] = {}
    out = []
    for rec in records:
        key = (rec.user_id, rec.environment)
        if last.get(key) == rec.genome:
            continue
        last[key] = rec.genome
        out.append(rec)
    return out


def select_seeds(pool: list[SeedRecord], n: int, per_user_cap: int) -> list[SeedRecord]:
    """Greedy scan in descending recorded fitness, at most `per_user_cap`
    designs per user; ties break on (user_id, iteration)."""
    ranked = sorted(pool, key=lambda r: (-r.recorded_fitness, r.user_id, r.iteration))
    taken: dict[str, int] = {}
    chosen = []
    for rec in ranked:
        if len(chosen) == n:
            break
        if taken.get(rec.user_id, 0) < per_user_cap:
            taken[rec.user_id] = taken.get(rec.user_id, 0) + 1
            chosen.append(rec)
    if len(chosen) < n:
        raise SeedSelectionError(f"need {n} seeds, have {len(chosen)}")
    return chosen


def _doubled_ranks(values: list[float]) -> list[int]:
    """Midranks times two (exact integers), in input order."""
    order = sorted(range(len(values)), key=values.__getitem__)
    out = [0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank2 = (i + 1) + (j + 1)  # twice the average of 1-based positions i..j
        for k in range(i, j + 1):
            out[order[k]] = rank2
        i = j + 1
    return out


def mann_whitney_u(x, y) -> dict:
    """Two-sided Mann-Whitney U with midrank ties.

    U counts x-over-y wins (plus half-ties), so U(x,y) + U(y,x) = n1*n2.
    Exact p by full enumeration of labelings (rank-sum subset counting) when
    n1+n2 <= 20; otherwise the normal approximation with tie and continuity
    corrections.
    """
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    n1, n2 = len(x), len(y)
    if n1 < 1 or n2 < 1:
        raise ValueError("both samples need at least one observation")
    rank2 = _doubled_ranks(x + y)
    sum2_x = sum(rank2[:n1])
    u2 = sum2_x - n1 * (n1 + 1)  # doubled U statistic, exact integer
    u = u2 / 2.0

    if n1 + n2 <= 20:
        p = _exact_p(rank2, n1, u2)
    else:
        p = _normal_p(rank2, n1, n2, u)
    return {"U": u, "p": p}


def _exact_p(rank2: list[int], n1: int, u2_obs: int) -> float:
    n = len(rank2)
    total = sum(rank2)
    # dp[k][s]: subsets of size k with doubled-rank sum s
    dp = [dict() for _ in range(n1 + 1)]
    dp[0][0] = 1
    for r in rank2:
        for k in range(min(n1, n) - 1, -1, -1):
            if not dp[k]:
                continue
            nxt = dp[k + 1]
            for s, cnt in dp[k].items():
                nxt[s + r] = nxt.get(s + r, 0) + cnt
    n2 = n - n1
    center2 = n1 * n2  # doubled n1*n2/2
    e_obs = abs(u2_obs - center2)
    extreme = 0
    count_all = 0
    for s, cnt in dp[n1].items():
        count_all += cnt
        u2 = s - n1 * (n1 + 1)
        if abs(u2 - center2) >= e_obs:
            extreme += cnt
    return extreme / count_all


def _normal_p(rank2: list[int], n1: int, n2: int, u: float) -> float:
    n = n1 + n2
    seen: dict[int, int] = {}
    for r in rank2:
        seen[r] = seen.get(r, 0) + 1
    tie_sum = sum(t**3 - t for t in seen.values())
    var = n1 * n2 / 12.0 * ((n + 1) - tie_sum / (n * (n - 1)))
    if var <= 0:
        return 1.0
    mu = n1 * n2 / 2.0
    z = max(abs(u - mu) - 0.5, 0.0) / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def pairwise_comparison(samples: dict[str, list[float]], order: list[str], alpha: float = 0.05) -> dict:
    """Upper-triangle condition-vs-condition comparison cells.

    Cell sign compares the column's mean to the row's ("+" column larger,
    "~" when the difference is under 0.5% of the smaller value); a "*" suffix
    marks Mann-Whitney significance at the given alpha.
    """
    cells = {}
    for i, row in enumerate(order):
        for col in order[i + 1 :]:
            a = samples[row]
            b = samples[col]
            mean_a = sum(a) / len(a)
            mean_b = sum(b) / len(b)
            small = min(abs(mean_a), abs(mean_b))
            if abs(mean_b - mean_a) < 0.005 * small:
                sign = "~"
            elif mean_b > mean_a:
                sign = "+"
            else:
                sign = "-"
            p = mann_whitney_u(a, b)["p"]
            cells[(row, col)] = sign + ("*" if p < alpha else "")
    return cells
