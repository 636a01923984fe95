import json
from pathlib import Path

import pytest

from legwork.cli import main
from legwork.genome import neutral_genome, to_record


def run_cli(*argv):
    return main(list(argv))


class TestRunCommand:
    def test_minimal_run(self, tmp_path, capsys):
        out = tmp_path / "runs"
        assert run_cli("run", "--env", "ground", "--condition", "h0",
                       "--iterations", "2", "--rng-seed", "3", "--out", str(out)) == 0
        printed = capsys.readouterr().out.strip().splitlines()
        assert printed == [str(out / "ground" / "h0" / "run0")]
        assert (out / "ground" / "h0" / "run0" / "log.csv").exists()

    def test_unknown_condition(self, tmp_path, capsys):
        assert run_cli("run", "--condition", "h7", "--out", str(tmp_path)) == 2

    def test_terrain_and_gait_configs(self, tmp_path):
        terrain_cfg = tmp_path / "terrain.json"
        terrain_cfg.write_text(json.dumps({
            "kind": "sine", "amplitude": 1.0, "wavelength": 40.0,
            "floor_width": 20.0, "bounds": [-20.0, 300.0, -60.0, 60.0],
        }))
        gait_cfg = tmp_path / "gait.json"
        gait_cfg.write_text(json.dumps({
            "targets_2link": [[-0.5, 0.8], [0.3, 0.2], [0.0, 0.0]],
            "targets_3link": [[-0.5, 0.8, -0.2], [0.3, 0.2, 0.1], [0.0, 0.0, 0.0]],
        }))
        out = tmp_path / "runs"
        assert run_cli("run", "--env", "sine", "--condition", "h0", "--iterations", "1",
                       "--out", str(out), "--terrain-config", str(terrain_cfg),
                       "--gait-config", str(gait_cfg)) == 0


class TestSimulateCommand:
    def test_design_file(self, tmp_path, capsys):
        design = tmp_path / "robot.json"
        design.write_text(json.dumps(to_record(neutral_genome())))
        frames_out = tmp_path / "frames.json"
        assert run_cli("simulate", "--genome", str(design), "--env", "ground",
                       "--frames-out", str(frames_out)) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["fitness"] == pytest.approx(result["dx"] - 0.5 * abs(result["dy"]))
        assert result["frames"] == 601
        frames = json.loads(frames_out.read_text())
        assert len(frames) == 601
        assert set(frames[0]) == {"t", "pose", "joint_angles"}


class TestGenSeedsCommand:
    def test_pool_file(self, tmp_path, capsys):
        out = tmp_path / "pool.json"
        assert run_cli("gen-seeds", "--mode", "scattered", "--n", "6",
                       "--env", "ground", "--rng-seed", "1", "--out", str(out)) == 0
        records = json.loads(out.read_text())
        assert len(records) == 6
        assert all("recorded_fitness" in r for r in records)


class TestAnalyzeCommand:
    def test_end_to_end(self, tmp_path, capsys):
        out = tmp_path / "runs"
        run_cli("run", "--env", "ground", "--condition", "h0", "--repeats", "2",
                "--iterations", "4", "--rng-seed", "0", "--out", str(out))
        capsys.readouterr()
        assert run_cli("analyze", "--runs", str(out), "--milestones", "1,2",
                       "--pairwise") == 0
        paths = [Path(p) for p in capsys.readouterr().out.strip().splitlines()]
        names = {p.name for p in paths}
        assert "fitness_rate_ground.csv" in names
        assert "coverage_rate_ground.csv" in names
        for p in paths:
            assert p.exists()
        table = (out / "analysis" / "coverage_rate_ground.csv").read_text().splitlines()
        assert table[0] == "percent,h0"
