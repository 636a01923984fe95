"""Experiment orchestration and persistence.

Runs condition x repeat matrices of MAP-Elites searches with reproducible
seeding (run seed = base seed + repeat index, shared across conditions so
repeats pair up), writes per-run CSV logs plus archive snapshots and a
manifest of content hashes, selects seed designs from pools under per-user
caps, and synthesizes seed pools when no recorded designs are available.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, evolution
from .analysis import SeedRecord, dedup_pool, select_seeds
from .controller import DEFAULT_GAIT, GaitTable
from .evolution import RunConfig, RunLog
from .genome import Genome, features, from_record, mutate, random_genome, to_record
from .simulator import SimConfig, simulate
from .terrain import Terrain, make_terrain

# (n_human, per_user_cap) per named seeding condition
CONDITIONS = {
    "h0": (0, 0),
    "h5": (5, 1),
    "h15": (15, 2),
    "h25": (25, 3),
    "h30": (30, 3),
}

LOG_HEADER = ["iter", "coverage", "mean_fitness", "best_fitness", "qd_score", "elite_mean"]
ARCHIVE_HEADER = ["row", "col", "fitness", "provenance", "genome"]


@dataclass(frozen=True)
class ExperimentPlan:
    environments: tuple[str, ...] = ("ground",)
    conditions: tuple[str, ...] = ("h0", "h5", "h15", "h25", "h30")
    repeats: int = 10
    base_seed: int = 0
    iterations: int = 2000
    out_dir: str = "runs"
    jobs: int = 1
    terrain: Terrain | None = None
    gait: GaitTable = DEFAULT_GAIT


class ManifestError(RuntimeError):
    pass


def make_evaluator(terrain: Terrain, gait: GaitTable = DEFAULT_GAIT):
    cfg = SimConfig(record_frames=False)

    def evaluate(g: Genome) -> float:
        return simulate(g, terrain, gait, cfg).fitness

    return evaluate


def seed_pairs(records: list[SeedRecord]) -> list[tuple[Genome, str]]:
    return [(r.genome, f"human:{r.user_id}") for r in records]


def run_condition(
    environment: str,
    condition: str,
    repeat: int,
    base_seed: int,
    iterations: int,
    pool: list[SeedRecord] | None,
    terrain: Terrain | None = None,
    gait: GaitTable = DEFAULT_GAIT,
) -> RunLog:
    """One (condition, repeat) search; repeats share seeds across conditions."""
    n_human, cap = CONDITIONS[condition.lower()]
    seeds = []
    if n_human:
        if not pool:
            raise analysis.SeedSelectionError(f"need {n_human} seeds, have 0")
        seeds = seed_pairs(select_seeds(pool, n_human, cap))
    cfg = RunConfig(
        environment=environment,
        iterations=iterations,
        seed=base_seed + repeat,
    )
    t = terrain or make_terrain(environment)
    return evolution.run(cfg, seeds, make_evaluator(t, gait))


def log_csv_text(log: RunLog) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LOG_HEADER)
    for r in log.records:
        w.writerow([r.iteration, r.coverage, r.mean_fitness, r.best_fitness, r.qd_score, r.elite_mean])
    return buf.getvalue()


def archive_csv_text(log: RunLog) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ARCHIVE_HEADER)
    for row, col, ind in log.archive.occupied():
        w.writerow([row, col, ind.fitness, ind.provenance, json.dumps(to_record(ind.genome), separators=(",", ":"))])
    return buf.getvalue()


def parse_log_csv(text: str) -> list[dict]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append(
            {
                "iteration": int(rec["iter"]),
                "coverage": float(rec["coverage"]),
                "mean_fitness": float(rec["mean_fitness"]),
                "best_fitness": float(rec["best_fitness"]),
                "qd_score": float(rec["qd_score"]),
                "elite_mean": float(rec["elite_mean"]),
            }
        )
    return rows


def parse_archive_csv(text: str) -> list[dict]:
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        out.append(
            {
                "row": int(rec["row"]),
                "col": int(rec["col"]),
                "fitness": float(rec["fitness"]),
                "provenance": rec["provenance"],
                "genome": from_record(json.loads(rec["genome"])),
            }
        )
    return out


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def write_run(out_dir: Path, log: RunLog, meta: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    log_text = log_csv_text(log)
    archive_text = archive_csv_text(log)
    (out_dir / "log.csv").write_text(log_text, encoding="utf-8")
    (out_dir / "archive.csv").write_text(archive_text, encoding="utf-8")
    manifest = dict(meta)
    manifest["config"] = log.config
    manifest["config_hash"] = _sha256(json.dumps(log.config, sort_keys=True))
    manifest["log_sha256"] = _sha256(log_text)
    manifest["archive_sha256"] = _sha256(archive_text)
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def check_manifest(run_dir: Path) -> dict:
    manifest = json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))
    problems = []
    for name, key in (("log.csv", "log_sha256"), ("archive.csv", "archive_sha256")):
        actual = _sha256((run_dir / name).read_text(encoding="utf-8"))
        if actual != manifest[key]:
            problems.append(f"{run_dir / name}: recorded {manifest[key][:12]}.., found {actual[:12]}..")
    if problems:
        raise ManifestError("manifest hash mismatch: " + "; ".join(problems))
    return manifest


def _run_job(args) -> str:
    env, condition, repeat, plan_dict, pool_records = args
    pool = load_pool_records(pool_records) if pool_records is not None else None
    terrain = None
    if plan_dict["terrain"] is not None:
        terrain = Terrain(**plan_dict["terrain"])
    gait = GaitTable(
        targets_2link=tuple(tuple(m) for m in plan_dict["gait"]["targets_2link"]),
        targets_3link=tuple(tuple(m) for m in plan_dict["gait"]["targets_3link"]),
    )
    log = run_condition(
        env, condition, repeat, plan_dict["base_seed"], plan_dict["iterations"],
        pool, terrain, gait,
    )
    out = Path(plan_dict["out_dir"]) / env / condition / f"run{repeat}"
    write_run(
        out,
        log,
        {"environment": env, "condition": condition, "repeat": repeat,
         "seed": plan_dict["base_seed"] + repeat},
    )
    return str(out)


def run_experiment(plan: ExperimentPlan, pool: list[SeedRecord] | None = None) -> list[str]:
    """Execute the full conditions x repeats matrix, one directory per run."""
    largest = max(CONDITIONS[c.lower()][0] for c in plan.conditions)
    if largest and pool is not None:
        for c in plan.conditions:
            n, cap = CONDITIONS[c.lower()]
            if n:
                select_seeds(pool, n, cap)  # raises early when infeasible
    elif largest and pool is None:
        raise analysis.SeedSelectionError(f"need {largest} seeds, have 0")

    plan_dict = {
        "base_seed": plan.base_seed,
        "iterations": plan.iterations,
        "out_dir": plan.out_dir,
        "terrain": None if plan.terrain is None else {
            "kind": plan.terrain.kind,
            "amplitude": plan.terrain.amplitude,
            "wavelength": plan.terrain.wavelength,
            "floor_width": plan.terrain.floor_width,
            "bounds": plan.terrain.bounds,
        },
        "gait": {
            "targets_2link": plan.gait.targets_2link,
            "targets_3link": plan.gait.targets_3link,
        },
    }
    pool_records = None if pool is None else pool_to_records(pool)
    jobs = []
    for env in plan.environments:
        for condition in plan.conditions:
            for repeat in range(plan.repeats):
                jobs.append((env, condition, repeat, plan_dict, pool_records))

    n_workers = min(plan.jobs, worker_cap())
    if n_workers <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool_exec:
        return list(pool_exec.map(_run_job, jobs))


def worker_cap() -> int:
    cap = os.environ.get("LEGWORK_THREADS")
    if cap:
        return max(1, int(cap))
    return os.cpu_count() or 1


# Seed pools: canonical design-record files (JSON array of records).

def pool_to_records(pool: list[SeedRecord]) -> list[dict]:
    return [
        to_record(
            r.genome,
            user_id=r.user_id,
            environment=r.environment,
            iteration=r.iteration,
            recorded_fitness=r.recorded_fitness,
        )
        for r in pool
    ]


def load_pool_records(records: list[dict]) -> list[SeedRecord]:
    pool = []
    for rec in records:
        pool.append(
            SeedRecord(
                user_id=str(rec.get("user_id", "anonymous")),
                environment=str(rec.get("environment", "")),
                iteration=int(rec.get("iteration", 0)),
                genome=from_record(rec),
                recorded_fitness=float(rec.get("recorded_fitness", 0.0)),
            )
        )
    return dedup_pool(pool)


def save_pool(path: str | Path, pool: list[SeedRecord]) -> None:
    Path(path).write_text(
        json.dumps(pool_to_records(pool), indent=1) + "\n", encoding="utf-8"
    )


def load_pool(path: str | Path) -> list[SeedRecord]:
    return load_pool_records(json.loads(Path(path).read_text(encoding="utf-8")))


# Synthetic seed pools standing in for recorded designer data.

FEATURE_RADIUS = 0.06  # cluster radius as a fraction of each feature range


def _feature_distance(a, b) -> float:
    dx = (a.body_length_x - b.body_length_x) / (30.0 - 3.5)
    dy = (a.leg_length_std - b.leg_length_std) / 21.5
    return max(abs(dx), abs(dy))


def _quadrant_sample(rng) -> Genome:
    """Uniform random genome restricted to the low/low feature quadrant."""
    while True:
        g = random_genome(rng)
        f = features(g)
        if f.body_length_x <= 16.75 and f.leg_length_std <= 10.75:
            return g


def generate_synthetic_seeds(
    environment: str,
    quality: str,
    n: int,
    rng: np.random.Generator,
    terrain: Terrain | None = None,
    gait: GaitTable = DEFAULT_GAIT,
    budget: int = 200,
) -> list[SeedRecord]:
    """Synthetic designer pools: `clustered_high` hill-climbs mutants of one
    anchor design inside a feature-radius (high fitness, low spread),
    `clustered_low` samples one feature quadrant without optimization,
    `scattered` is plain uniform sampling. Users are assigned round-robin
    over ceil(n/3) synthetic ids."""
    if n < 1:
        raise ValueError("n must be at least 1")
    t = terrain or make_terrain(environment)
    evaluate = make_evaluator(t, gait)

    designs: list[tuple[Genome, float]] = []
    if quality == "scattered":
        for _ in range(n):
            g = random_genome(rng)
            designs.append((g, evaluate(g)))
    elif quality == "clustered_low":
        for _ in range(n):
            g = _quadrant_sample(rng)
            designs.append((g, evaluate(g)))
    elif quality == "clustered_high":
        anchor = _quadrant_sample(rng)
        anchor_f = features(anchor)
        for _ in range(n):
            g = mutate(anchor, 0.1, rng)
            if _feature_distance(features(g), anchor_f) > FEATURE_RADIUS:
                g = anchor
            best_fit = evaluate(g)
            for _ in range(budget):
                cand = mutate(g, 0.1, rng)
                if _feature_distance(features(cand), anchor_f) > FEATURE_RADIUS:
                    continue
                fit = evaluate(cand)
                if fit > best_fit:
                    g, best_fit = cand, fit
            designs.append((g, best_fit))
        designs.sort(key=lambda d: -d[1])
        designs = designs[:n]
    else:
        raise ValueError(f"unknown quality mode: {quality!r}")

    n_users = -(-n // 3)  # ceil
    pool = []
    per_user_count: dict[str, int] = {}
    for k, (g, fit) in enumerate(designs):
        user = f"synth-u{k % n_users:02d}"
        pool.append(
            SeedRecord(
                user_id=user,
                environment=environment,
                iteration=per_user_count.get(user, 0),
                genome=g,
                recorded_fitness=fit,
            )
        )
        per_user_count[user] = per_user_count.get(user, 0) + 1
    return dedup_pool(pool)


# Analysis over persisted experiment trees.

def collect_runs(root: Path) -> dict[str, dict[str, list[dict]]]:
    """{environment: {condition: [run dicts]}} with manifest verification."""
    out: dict[str, dict[str, list[dict]]] = {}
    for manifest_path in sorted(root.glob("*/*/run*/manifest.json")):
        run_dir = manifest_path.parent
        manifest = check_manifest(run_dir)
        env = manifest["environment"]
        condition = manifest["condition"]
        records = parse_log_csv((run_dir / "log.csv").read_text(encoding="utf-8"))
        archive = parse_archive_csv((run_dir / "archive.csv").read_text(encoding="utf-8"))
        out.setdefault(env, {}).setdefault(condition, []).append(
            {"manifest": manifest, "records": records, "archive": archive}
        )
    if not out:
        raise FileNotFoundError(f"no runs found under {root}")
    return out


def milestone_table(
    runs_by_condition: dict[str, list[dict]],
    percents: list[float],
    kind: str,
    conditions: list[str],
) -> list[list[str]]:
    """CSV rows: per-percent mean iterations per condition ('' if unreached)."""
    rows = [["percent"] + conditions]
    for p in percents:
        row = [f"{p:g}"]
        for condition in conditions:
            vals = []
            for run_data in runs_by_condition.get(condition, []):
                if kind == "coverage":
                    hit = analysis.coverage_milestones(run_data["records"], [p])[p]
                else:
                    hit = analysis.fitness_milestones(run_data["records"], [p], mode=kind)[p]
                if hit is not None:
                    vals.append(hit)
            row.append(f"{sum(vals) / len(vals):.1f}" if vals else "")
        rows.append(row)
    return rows


def final_metric_samples(
    runs_by_condition: dict[str, list[dict]], metric: str
) -> dict[str, list[float]]:
    return {
        condition: [run_data["records"][-1][metric] for run_data in runs]
        for condition, runs in runs_by_condition.items()
    }


def coverage_iteration_samples(
    runs_by_condition: dict[str, list[dict]], percent: float
) -> dict[str, list[float]]:
    out = {}
    for condition, runs in runs_by_condition.items():
        vals = []
        for run_data in runs:
            hit = analysis.coverage_milestones(run_data["records"], [percent])[percent]
            if hit is not None:
                vals.append(float(hit))
        out[condition] = vals
    return out


def pairwise_table(samples: dict[str, list[float]], conditions: list[str]) -> list[list[str]]:
    cells = analysis.pairwise_comparison(samples, conditions)
    header = [""] + conditions[1:]
    rows = [header]
    for i, row_cond in enumerate(conditions[:-1]):
        row = [row_cond]
        for col_cond in conditions[1:]:
            row.append(cells.get((row_cond, col_cond), ""))
        rows.append(row)
    return rows


def write_csv(path: Path, rows: list[list[str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")
