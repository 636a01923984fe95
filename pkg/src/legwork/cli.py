"""Command-line front end: run experiments, simulate designs, analyze runs,
generate synthetic seed pools, and serve the designer API."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .controller import DEFAULT_GAIT, load_gait_config
from .genome import from_record
from .runner import (
    CONDITIONS,
    ExperimentPlan,
    collect_runs,
    final_metric_samples,
    coverage_iteration_samples,
    generate_synthetic_seeds,
    load_pool,
    milestone_table,
    pairwise_table,
    run_experiment,
    save_pool,
    write_csv,
)
from .simulator import simulate
from .terrain import load_terrain_config, make_terrain


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="legwork")
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run seeding-condition experiments")
    run_p.add_argument("--env", default="ground", choices=["ground", "sine", "valley"])
    run_p.add_argument("--condition", default="h0", help="h0|h5|h15|h25|h30, comma separated")
    run_p.add_argument("--repeats", type=int, default=1)
    run_p.add_argument("--iterations", type=int, default=2000)
    run_p.add_argument("--rng-seed", type=int, default=0)
    run_p.add_argument("--seeds-file", default=None)
    run_p.add_argument("--out", default="runs")
    run_p.add_argument("--jobs", type=int, default=1)
    run_p.add_argument("--terrain-config", default=None)
    run_p.add_argument("--gait-config", default=None)

    sim_p = sub.add_parser("simulate", help="simulate one design file")
    sim_p.add_argument("--genome", required=True, help="design record JSON file")
    sim_p.add_argument("--env", default="ground", choices=["ground", "sine", "valley"])
    sim_p.add_argument("--frames-out", default=None)
    sim_p.add_argument("--terrain-config", default=None)
    sim_p.add_argument("--gait-config", default=None)

    an_p = sub.add_parser("analyze", help="milestone tables and significance matrices")
    an_p.add_argument("--runs", required=True, help="experiment output root")
    an_p.add_argument("--milestones", default="30,40,50,60,70,80,90")
    an_p.add_argument("--pairwise", action="store_true")
    an_p.add_argument("--out", default=None, help="defaults to <runs>/analysis")

    gen_p = sub.add_parser("gen-seeds", help="generate a synthetic seed pool")
    gen_p.add_argument("--mode", required=True,
                       choices=["clustered_high", "clustered_low", "scattered"])
    gen_p.add_argument("--n", type=int, required=True)
    gen_p.add_argument("--env", default="ground", choices=["ground", "sine", "valley"])
    gen_p.add_argument("--rng-seed", type=int, default=0)
    gen_p.add_argument("--out", default=None, help="pool file (default <mode>_<env>.json)")

    serve_p = sub.add_parser("serve", help="serve the designer wire API")
    serve_p.add_argument("--port", type=int, default=8151)
    serve_p.add_argument("--data-dir", default=None)
    serve_p.add_argument("--rng-seed", type=int, default=None)

    return p


def _load_gait(path):
    return load_gait_config(path) if path else DEFAULT_GAIT


def cmd_run(args) -> int:
    terrain = load_terrain_config(args.terrain_config, kind=args.env) if args.terrain_config else None
    conditions = tuple(c.strip().lower() for c in args.condition.split(","))
    for c in conditions:
        if c not in CONDITIONS:
            print(f"unknown condition: {c}", file=sys.stderr)
            return 2
    plan = ExperimentPlan(
        environments=(args.env,),
        conditions=conditions,
        repeats=args.repeats,
        base_seed=args.rng_seed,
        iterations=args.iterations,
        out_dir=args.out,
        jobs=args.jobs,
        terrain=terrain,
        gait=_load_gait(args.gait_config),
    )
    pool = load_pool(args.seeds_file) if args.seeds_file else None
    for path in run_experiment(plan, pool):
        print(path)
    return 0


def cmd_simulate(args) -> int:
    rec = json.loads(Path(args.genome).read_text(encoding="utf-8"))
    if isinstance(rec, list):
        rec = rec[0]
    g = from_record(rec)
    terrain = (
        load_terrain_config(args.terrain_config, kind=args.env)
        if args.terrain_config
        else make_terrain(args.env)
    )
    result = simulate(g, terrain, gait=_load_gait(args.gait_config))
    print(json.dumps({
        "fitness": result.fitness,
        "dx": result.dx,
        "dy": result.dy,
        "fell_off": result.fell_off,
        "frames": result.frames.shape[0],
    }))
    if args.frames_out:
        frames = [
            {"t": row[0], "pose": list(row[1:5]), "joint_angles": list(row[5:])}
            for row in result.frames.tolist()
        ]
        Path(args.frames_out).write_text(json.dumps(frames), encoding="utf-8")
    return 0


def cmd_analyze(args) -> int:
    root = Path(args.runs)
    out_dir = Path(args.out) if args.out else root / "analysis"
    percents = [float(v) for v in args.milestones.split(",")]
    tree = collect_runs(root)
    written = []
    for env, by_condition in tree.items():
        conditions = [c for c in CONDITIONS if c in by_condition]
        path = out_dir / f"fitness_rate_{env}.csv"
        write_csv(path, milestone_table(by_condition, percents, "mean", conditions))
        written.append(path)
        path = out_dir / f"coverage_rate_{env}.csv"
        write_csv(path, milestone_table(by_condition, percents, "coverage", conditions))
        written.append(path)
        if args.pairwise and len(conditions) >= 2:
            for metric, stem in (("mean_fitness", "pairwise_mean"), ("best_fitness", "pairwise_best")):
                samples = final_metric_samples(by_condition, metric)
                path = out_dir / f"{stem}_{env}.csv"
                write_csv(path, pairwise_table(samples, conditions))
                written.append(path)
            for pct in (50.0, 90.0):
                samples = coverage_iteration_samples(by_condition, pct)
                usable = [c for c in conditions if samples.get(c)]
                if len(usable) >= 2:
                    path = out_dir / f"pairwise_coverage{pct:g}_{env}.csv"
                    write_csv(path, pairwise_table(samples, usable))
                    written.append(path)
    for path in written:
        print(path)
    return 0


def cmd_gen_seeds(args) -> int:
    rng = np.random.default_rng(args.rng_seed)
    pool = generate_synthetic_seeds(args.env, args.mode, args.n, rng)
    out = args.out or f"{args.mode}_{args.env}.json"
    save_pool(out, pool)
    print(out)
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(port=args.port, data_dir=args.data_dir, rng_seed=args.rng_seed)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "run": cmd_run,
        "simulate": cmd_simulate,
        "analyze": cmd_analyze,
        "gen-seeds": cmd_gen_seeds,
        "serve": cmd_serve,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
