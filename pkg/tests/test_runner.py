from pathlib import Path

import numpy as np
import pytest

from legwork.analysis import SeedRecord, SeedSelectionError
from legwork.evolution import bin_of
from legwork.genome import features, neutral_genome, random_genome, validate
from legwork.runner import (
    ExperimentPlan,
    ManifestError,
    check_manifest,
    collect_runs,
    generate_synthetic_seeds,
    load_pool,
    make_evaluator,
    milestone_table,
    parse_archive_csv,
    parse_log_csv,
    run_experiment,
    save_pool,
)
from legwork.terrain import make_terrain


def small_plan(tmp_path, **kw):
    defaults = dict(
        environments=("ground",),
        conditions=("h0",),
        repeats=2,
        base_seed=1,
        iterations=3,
        out_dir=str(tmp_path / "runs"),
    )
    defaults.update(kw)
    return ExperimentPlan(**defaults)


class TestRunExperiment:
    def test_two_repeats_reproduce_byte_identical(self, tmp_path):
        plan = small_plan(tmp_path)
        paths = run_experiment(plan)
        assert len(paths) == 2
        first = {p: (Path(p) / "log.csv").read_bytes() for p in paths}
        arch_first = {p: (Path(p) / "archive.csv").read_bytes() for p in paths}
        run_experiment(plan)
        for p in paths:
            assert (Path(p) / "log.csv").read_bytes() == first[p]
            assert (Path(p) / "archive.csv").read_bytes() == arch_first[p]

    def test_repeats_differ_from_each_other(self, tmp_path):
        paths = run_experiment(small_plan(tmp_path))
        a = (Path(paths[0]) / "log.csv").read_text()
        b = (Path(paths[1]) / "log.csv").read_text()
        assert a != b

    def test_layout(self, tmp_path):
        paths = run_experiment(small_plan(tmp_path))
        assert paths[0].endswith("ground/h0/run0")
        for p in paths:
            d = Path(p)
            assert (d / "log.csv").exists()
            assert (d / "archive.csv").exists()
            assert (d / "manifest.json").exists()

    def test_seeded_condition_needs_pool(self, tmp_path):
        plan = small_plan(tmp_path, conditions=("h25",))
        with pytest.raises(SeedSelectionError, match="need 25 seeds, have 0"):
            run_experiment(plan, None)

    def test_undersized_pool_reports_shortfall(self, tmp_path):
        pool = [
            SeedRecord(f"u{i}", "ground", 0, neutral_genome(), float(i))
            for i in range(20)
        ]
        plan = small_plan(tmp_path, conditions=("h25",))
        with pytest.raises(SeedSelectionError, match="need 25 seeds, have 20"):
            run_experiment(plan, pool)

    def test_parallel_jobs_match_serial(self, tmp_path):
        serial = run_experiment(small_plan(tmp_path, out_dir=str(tmp_path / "a")))
        parallel = run_experiment(
            small_plan(tmp_path, out_dir=str(tmp_path / "b"), jobs=2)
        )
        for p1, p2 in zip(sorted(serial), sorted(parallel)):
            assert (Path(p1) / "log.csv").read_bytes() == (Path(p2) / "log.csv").read_bytes()


class TestManifest:
    def test_hash_mismatch_detected(self, tmp_path):
        paths = run_experiment(small_plan(tmp_path, repeats=1))
        run_dir = Path(paths[0])
        check_manifest(run_dir)
        log = run_dir / "log.csv"
        log.write_text(log.read_text() + "tampered\n")
        with pytest.raises(ManifestError, match="log.csv"):
            check_manifest(run_dir)
        with pytest.raises(ManifestError):
            collect_runs(run_dir.parent.parent.parent)


class TestCsvFormats:
    def test_log_round_trip(self, tmp_path):
        paths = run_experiment(small_plan(tmp_path, repeats=1))
        text = (Path(paths[0]) / "log.csv").read_text()
        assert text.splitlines()[0] == "iter,coverage,mean_fitness,best_fitness,qd_score,elite_mean"
        rows = parse_log_csv(text)
        assert rows[0]["iteration"] == 0
        assert rows[-1]["iteration"] == 3

    def test_archive_round_trip(self, tmp_path):
        paths = run_experiment(small_plan(tmp_path, repeats=1))
        text = (Path(paths[0]) / "archive.csv").read_text()
        cells = parse_archive_csv(text)
        assert cells
        for cell in cells:
            assert validate(cell["genome"]) == []
            r, c = bin_of(features(cell["genome"]))
            assert (r, c) == (cell["row"], cell["col"])


class TestPoolIO:
    def test_save_load_bit_exact(self, tmp_path):
        rng = np.random.default_rng(80)
        pool = [
            SeedRecord(f"u{i}", "sine", i, random_genome(rng), float(rng.normal()))
            for i in range(10)
        ]
        path = tmp_path / "pool.json"
        save_pool(path, pool)
        assert load_pool(path) == pool


class TestSyntheticSeeds:
    def test_scattered_spreads_cells(self):
        rng = np.random.default_rng(81)
        pool = generate_synthetic_seeds("ground", "scattered", 30, rng)
        cells = {bin_of(features(r.genome)) for r in pool}
        assert len(cells) >= 15

    def test_clustered_low_stays_in_quadrant(self):
        rng = np.random.default_rng(82)
        pool = generate_synthetic_seeds("ground", "clustered_low", 12, rng)
        for rec in pool:
            f = features(rec.genome)
            assert f.body_length_x <= 16.75
            assert f.leg_length_std <= 10.75

    def test_clustered_high_beats_random_percentile(self):
        rng = np.random.default_rng(83)
        pool = generate_synthetic_seeds("ground", "clustered_high", 5, rng, budget=120)
        evaluate = make_evaluator(make_terrain("ground"))
        baseline_rng = np.random.default_rng(84)
        baseline = sorted(evaluate(random_genome(baseline_rng)) for _ in range(500))
        p90 = baseline[int(0.9 * len(baseline))]
        for rec in pool:
            assert rec.recorded_fitness >= p90

    def test_pool_validates_and_has_user_shape(self):
        rng = np.random.default_rng(85)
        pool = generate_synthetic_seeds("ground", "scattered", 30, rng)
        assert len(pool) == 30
        users = {r.user_id for r in pool}
        assert len(users) == 10  # ceil(30/3) synthetic users
        for rec in pool:
            assert validate(rec.genome) == []

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            generate_synthetic_seeds("ground", "mystery", 3, np.random.default_rng(0))


class TestMilestoneTable:
    def test_aggregates_mean_iterations(self, tmp_path):
        plan = small_plan(tmp_path, repeats=2, iterations=5)
        run_experiment(plan)
        tree = collect_runs(Path(plan.out_dir))
        table = milestone_table(tree["ground"], [1.0, 5.0], "coverage", ["h0"])
        assert table[0] == ["percent", "h0"]
        assert len(table) == 3
