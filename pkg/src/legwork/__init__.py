"""Deterministic legged-robot design workbench.

Parametric robot genomes compile to simple box-and-link phenotypes that walk
a fixed two-group gait over heightfield terrains under a quasi-static anchor
model; a MAP-Elites searcher illuminates the (body length, leg-length spread)
feature map, optionally seeded with recorded designer input; analysis tools
reproduce the coverage/fitness rate tables and significance matrices.
"""

from .genome import (  # noqa: F401
    FeatureDescriptor,
    Genome,
    LegGenome,
    LinkGenome,
    crossover,
    features,
    mirror,
    mutate,
    neutral_genome,
    random_genome,
    validate,
)
from .morphology import Morphology, build_phenotype, leg_lengths  # noqa: F401
from .terrain import Terrain, height_at, in_bounds, make_terrain  # noqa: F401
from .controller import GaitTable, assign_groups, group_sequence  # noqa: F401
from .simulator import SimConfig, SimResult, fitness, simulate  # noqa: F401
from .evolution import Archive, Individual, RunConfig, RunLog, bin_of, insert, run  # noqa: F401
from .analysis import (  # noqa: F401
    archive_stats,
    coverage_milestones,
    fitness_milestones,
    mann_whitney_u,
    reliability_precision,
    select_seeds,
)

__version__ = "0.1.0"
