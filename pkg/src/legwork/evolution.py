"""MAP-Elites search over robot genomes.

A 20x20 grid keyed by (body x-length, leg-length std) holds the best-known
individual per cell. Each iteration draws 30 parents uniformly from the
occupied cells, produces 30 children by ring-adjacent crossover (rate 0.75)
plus mutation (rate 0.1), evaluates them, and inserts in index order, so a
run is a pure function of (config, seeds).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from . import analysis
from .genome import (
    BODY_LENGTH_RANGE,
    LEG_STD_RANGE,
    FeatureDescriptor,
    Genome,
    crossover,
    features,
    mutate,
    random_genome,
)

ROWS = 20
COLS = 20


@dataclass(frozen=True)
class Individual:
    genome: Genome
    fitness: float
    features: FeatureDescriptor
    provenance: str  # "random" | "human:<user>" | "evolved:..."


@dataclass(frozen=True)
class RunConfig:
    environment: str = "ground"
    iterations: int = 2000
    batch_size: int = 30
    init_size: int = 30
    mutation_rate: float = 0.1
    crossover_rate: float = 0.75
    seed: int = 0

    def echo(self) -> dict:
        return {
            "environment": self.environment,
            "iterations": self.iterations,
            "batch_size": self.batch_size,
            "init_size": self.init_size,
            "mutation_rate": self.mutation_rate,
            "crossover_rate": self.crossover_rate,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class StatsRecord:
    iteration: int
    coverage: float
    mean_fitness: float
    best_fitness: float
    qd_score: float
    elite_mean: float


@dataclass
class RunLog:
    records: list[StatsRecord]
    archive: "Archive"
    config: dict


class Archive:
    """One elite per cell; insertion keeps the strictly fitter individual."""

    def __init__(self):
        self.grid: list[Optional[Individual]] = [None] * (ROWS * COLS)

    def cell(self, row: int, col: int) -> Optional[Individual]:
        return self.grid[row * COLS + col]

    def occupied(self) -> list[tuple[int, int, Individual]]:
        out = []
        for idx, ind in enumerate(self.grid):
            if ind is not None:
                out.append((idx // COLS, idx % COLS, ind))
        return out

    def fitness_grid(self) -> np.ndarray:
        """(ROWS, COLS) array of fitness, NaN where empty."""
        g = np.full((ROWS, COLS), np.nan)
        for r, c, ind in self.occupied():
            g[r, c] = ind.fitness
        return g


def bin_of(f: FeatureDescriptor) -> tuple[int, int]:
    """Uniform binning over the fixed feature bounds; the upper bound clamps
    into the last bin."""
    return (
        _bin(f.body_length_x, *BODY_LENGTH_RANGE, ROWS),
        _bin(f.leg_length_std, *LEG_STD_RANGE, COLS),
    )


def _bin(v: float, lo: float, hi: float, n: int) -> int:
    idx = int((v - lo) / (hi - lo) * n)
    return min(max(idx, 0), n - 1)


def insert(a: Archive, ind: Individual) -> str:
    """Returns "placed_new", "replaced", or "rejected" (ties keep incumbent)."""
    row, col = bin_of(ind.features)
    idx = row * COLS + col
    incumbent = a.grid[idx]
    if incumbent is None:
        a.grid[idx] = ind
        return "placed_new"
    if ind.fitness > incumbent.fitness:
        a.grid[idx] = ind
        return "replaced"
    return "rejected"


def select_parents(a: Archive, n: int, rng: np.random.Generator) -> list[Individual]:
    """n uniform draws over occupied cells, with replacement."""
    occ = [ind for ind in a.grid if ind is not None]
    if not occ:
        raise ValueError("cannot select parents from an empty archive")
    picks = rng.integers(0, len(occ), size=n)
    return [occ[int(i)] for i in picks]


def make_batch(parents: list[Individual], cfg: RunConfig, rng: np.random.Generator) -> list[tuple[Genome, str]]:
    """(child genome, provenance) per parent; ring-adjacent crossover."""
    n = len(parents)
    if n != cfg.batch_size:
        raise ValueError(f"expected {cfg.batch_size} parents, got {n}")
    out = []
    for i, parent in enumerate(parents):
        mate = parents[(i + 1) % n]
        if rng.random() < cfg.crossover_rate:
            child = crossover(parent.genome, mate.genome, rng)
            prov = f"evolved:x:{_cell_tag(parent)}+{_cell_tag(mate)}"
        else:
            child = parent.genome
            prov = f"evolved:c:{_cell_tag(parent)}"
        out.append((mutate(child, cfg.mutation_rate, rng), prov))
    return out


def _cell_tag(ind: Individual) -> str:
    row, col = bin_of(ind.features)
    return f"{row},{col}"


def init_population(
    seeds: Iterable[tuple[Genome, str]], n_random: int, rng: np.random.Generator
) -> list[tuple[Genome, str]]:
    """Seed genomes (passed through for re-evaluation) plus uniform randoms."""
    pop = list(seeds)
    if len(pop) + n_random == 0:
        raise ValueError("initial population is empty")
    for _ in range(n_random):
        pop.append((random_genome(rng), "random"))
    return pop


ChangeCallback = Callable[[int, StatsRecord, list[tuple[int, int, Individual]]], None]


def run(
    cfg: RunConfig,
    seeds: list[tuple[Genome, str]],
    evaluator: Callable[[Genome], float],
    on_iteration: ChangeCallback | None = None,
) -> RunLog:
    """Full search loop. `seeds` are (genome, provenance) pairs that get
    re-evaluated in the current environment before insertion; the rest of the
    initial population is sampled uniformly. Deterministic given (cfg, seeds).
    """
    rng = np.random.default_rng(cfg.seed)
    n_random = cfg.init_size - len(seeds)
    if n_random < 0:
        raise ValueError(f"more seeds ({len(seeds)}) than the initial population size ({cfg.init_size})")

    archive = Archive()
    records: list[StatsRecord] = []

    def evaluate_and_insert(batch: list[tuple[Genome, str]]) -> list[tuple[int, int, Individual]]:
        changed = []
        for genome, prov in batch:
            ind = Individual(genome, evaluator(genome), features(genome), prov)
            if insert(archive, ind) != "rejected":
                row, col = bin_of(ind.features)
                changed.append((row, col, ind))
        return changed

    changed = evaluate_and_insert(init_population(seeds, n_random, rng))
    records.append(_stats_record(0, archive))
    if on_iteration:
        on_iteration(0, records[-1], changed)

    for it in range(1, cfg.iterations + 1):
        parents = select_parents(archive, cfg.batch_size, rng)
        batch = make_batch(parents, cfg, rng)
        batch = [(g, f"{prov}@{it}") for g, prov in batch]
        changed = evaluate_and_insert(batch)
        records.append(_stats_record(it, archive))
        if on_iteration:
            on_iteration(it, records[-1], changed)

    return RunLog(records, archive, cfg.echo())


def _stats_record(iteration: int, archive: Archive) -> StatsRecord:
    st = analysis.archive_stats(archive)
    return StatsRecord(
        iteration,
        st["coverage"],
        st["mean_fitness"],
        st["best_fitness"],
        st["qd_score"],
        st["elite_mean"],
    )
