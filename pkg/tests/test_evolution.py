import numpy as np
import pytest

from legwork.evolution import (
    Archive,
    COLS,
    Individual,
    ROWS,
    RunConfig,
    bin_of,
    insert,
    init_population,
    make_batch,
    run,
    select_parents,
)
from legwork.genome import FeatureDescriptor, features, neutral_genome, random_genome


def individual(fit, body=20.0, std=0.0, prov="random"):
    g = neutral_genome()
    return Individual(g, fit, FeatureDescriptor(body, std), prov)


class TestBinOf:
    def test_lower_corner(self):
        assert bin_of(FeatureDescriptor(3.5, 0.0)) == (0, 0)

    def test_upper_clamp(self):
        assert bin_of(FeatureDescriptor(30.0, 21.5)) == (19, 19)

    def test_interior(self):
        # (16.75-3.5)/1.325 = 10.0 and 10.75/1.075 = 10.0
        assert bin_of(FeatureDescriptor(16.75, 10.75)) == (10, 10)

    def test_every_random_genome_bins(self):
        rng = np.random.default_rng(50)
        for _ in range(2000):
            r, c = bin_of(features(random_genome(rng)))
            assert 0 <= r < ROWS and 0 <= c < COLS


class TestInsert:
    def test_empty_cell(self):
        a = Archive()
        assert insert(a, individual(1.0)) == "placed_new"

    def test_lower_fitness_rejected(self):
        a = Archive()
        insert(a, individual(7.0))
        assert insert(a, individual(5.0)) == "rejected"
        assert a.cell(*bin_of(FeatureDescriptor(20.0, 0.0))).fitness == 7.0

    def test_tie_keeps_incumbent(self):
        a = Archive()
        first = individual(7.0, prov="first")
        insert(a, first)
        assert insert(a, individual(7.0, prov="second")) == "rejected"
        assert a.cell(*bin_of(FeatureDescriptor(20.0, 0.0))).provenance == "first"

    def test_higher_replaces(self):
        a = Archive()
        insert(a, individual(5.0))
        assert insert(a, individual(8.0)) == "replaced"


class TestArchiveOracle:
    def test_replay_500_insertions(self):
        rng = np.random.default_rng(51)
        a = Archive()
        history = {}
        for _ in range(500):
            ind = individual(
                float(rng.normal()), float(rng.uniform(3.5, 30)), float(rng.uniform(0, 21.5))
            )
            insert(a, ind)
            history.setdefault(bin_of(ind.features), []).append(ind)
        for cell, inds in history.items():
            best = max(inds, key=lambda i: i.fitness)
            stored = a.cell(*cell)
            assert stored.fitness == best.fitness
            r, c = bin_of(stored.features)
            assert (r, c) == cell


class TestSelectParents:
    def test_single_cell_forces_identical(self):
        a = Archive()
        insert(a, individual(1.0))
        rng = np.random.default_rng(52)
        parents = select_parents(a, 30, rng)
        assert len(parents) == 30
        assert all(p is parents[0] for p in parents)

    def test_deterministic(self):
        a = Archive()
        rng_fill = np.random.default_rng(53)
        for _ in range(100):
            insert(a, individual(float(rng_fill.normal()), float(rng_fill.uniform(3.5, 30)),
                                 float(rng_fill.uniform(0, 21.5))))
        p1 = select_parents(a, 30, np.random.default_rng(9))
        p2 = select_parents(a, 30, np.random.default_rng(9))
        assert [id(x) for x in p1] == [id(x) for x in p2]

    def test_uniform_over_occupied(self):
        a = Archive()
        for r in range(ROWS):
            for c in range(COLS):
                f = FeatureDescriptor(3.5 + (r + 0.5) * 1.325, (c + 0.5) * 1.075)
                insert(a, Individual(neutral_genome(), 0.0, f, "random"))
        assert len(a.occupied()) == 400
        counts = np.zeros(400, dtype=int)
        draws = 1_000_000
        parents = select_parents(a, draws, np.random.default_rng(54))
        index_of = {id(ind): i for i, ind in enumerate(a.grid)}
        for p in parents:
            counts[index_of[id(p)]] += 1
        expected = draws / 400
        assert np.all(np.abs(counts - expected) < 0.1 * expected)

    def test_empty_archive_errors(self):
        with pytest.raises(ValueError):
            select_parents(Archive(), 30, np.random.default_rng(0))


class TestMakeBatch:
    def _parents(self, n=30):
        rng = np.random.default_rng(55)
        return [
            Individual(random_genome(rng), 0.0, FeatureDescriptor(10.0, 1.0), "random")
            for _ in range(n)
        ]

    def test_degenerate_rates_clone(self):
        cfg = RunConfig(crossover_rate=0.0, mutation_rate=0.0)
        parents = self._parents()
        batch = make_batch(parents, cfg, np.random.default_rng(56))
        assert [g for g, _ in batch] == [p.genome for p in parents]

    def test_deterministic(self):
        cfg = RunConfig()
        parents = self._parents()
        b1 = make_batch(parents, cfg, np.random.default_rng(57))
        b2 = make_batch(parents, cfg, np.random.default_rng(57))
        assert b1 == b2

    def test_crossover_rate_frequency(self):
        cfg = RunConfig()
        parents = self._parents()
        rng = np.random.default_rng(58)
        crossed = total = 0
        for _ in range(1000):
            for _, prov in make_batch(parents, cfg, rng):
                total += 1
                crossed += prov.startswith("evolved:x:")
        assert abs(crossed / total - 0.75) < 0.01

    def test_size_mismatch_rejected(self):
        with pytest.raises(ValueError):
            make_batch(self._parents(10), RunConfig(), np.random.default_rng(0))


class TestInitPopulation:
    def test_h0_is_all_random(self):
        pop = init_population([], 30, np.random.default_rng(59))
        assert len(pop) == 30
        assert all(prov == "random" for _, prov in pop)

    def test_h30_is_all_seeds(self):
        seeds = [(neutral_genome(), f"human:u{i}") for i in range(30)]
        pop = init_population(seeds, 0, np.random.default_rng(60))
        assert pop == seeds


def flat_evaluator(g):
    """Cheap, deterministic stand-in for simulate: a smooth genome hash."""
    f = features(g)
    return f.body_length_x * 0.1 - abs(f.leg_length_std - 5.0) * 0.05


class TestRun:
    def test_zero_iterations_logs_init_only(self):
        cfg = RunConfig(iterations=0, seed=1)
        log = run(cfg, [], flat_evaluator)
        assert len(log.records) == 1
        assert log.records[0].iteration == 0

    def test_deterministic_runlog(self):
        cfg = RunConfig(iterations=20, seed=2)
        a = run(cfg, [], flat_evaluator)
        b = run(cfg, [], flat_evaluator)
        assert a.records == b.records
        assert [(r, c, i.fitness) for r, c, i in a.archive.occupied()] == [
            (r, c, i.fitness) for r, c, i in b.archive.occupied()
        ]

    def test_coverage_monotone(self):
        log = run(RunConfig(iterations=50, seed=3), [], flat_evaluator)
        cov = [r.coverage for r in log.records]
        assert all(b >= a for a, b in zip(cov, cov[1:]))

    def test_qd_score_monotone(self):
        log = run(RunConfig(iterations=50, seed=4), [], flat_evaluator)
        qd = [r.qd_score for r in log.records]
        assert all(b >= a - 1e-12 for a, b in zip(qd, qd[1:]))

    def test_per_cell_fitness_monotone(self):
        snapshots = []

        def cb(it, rec, changed):
            snapshots.append({(r, c): i.fitness for r, c, i in changed})

        run(RunConfig(iterations=50, seed=5), [], flat_evaluator, on_iteration=cb)
        best = {}
        for snap in snapshots:
            for cell, fit in snap.items():
                if cell in best:
                    assert fit > best[cell]
                best[cell] = fit

    def test_best_at_init_includes_best_seed(self):
        seeds = [(neutral_genome(), "human:u0")]
        cfg = RunConfig(iterations=0, seed=6)
        log = run(cfg, seeds, flat_evaluator)
        assert log.records[0].best_fitness >= flat_evaluator(neutral_genome())

    def test_too_many_seeds_rejected(self):
        seeds = [(neutral_genome(), "human:u")] * 31
        with pytest.raises(ValueError):
            run(RunConfig(iterations=0), seeds, flat_evaluator)
