import json

import numpy as np
import pytest

from legwork.controller import (
    DEFAULT_GAIT,
    MAX_JOINT_VEL,
    GaitTable,
    assign_groups,
    group_sequence,
    load_gait_config,
    make_controller,
    step_controller,
    timeout_steps,
)
from legwork.genome import Genome, LegGenome, LinkGenome, neutral_genome, random_genome
from legwork.morphology import build_phenotype

DT = 0.005


def label_positions(g):
    """Map position labels (FL, FR, MR, ...) to genome leg indices."""
    m = build_phenotype(g)
    labels = {}
    for leg in m.legs:
        side = "L" if leg.side == "left" else "R"
        labels[(leg.attach[0], side)] = leg.genome_index
    out = {}
    for side in ("L", "R"):
        xs = sorted({x for (x, s) in labels if s == side}, reverse=True)
        names = {1: ["F"], 2: ["F", "R"], 3: ["F", "M", "R"]}[len(xs)]
        for name, x in zip(names, xs):
            out[name + side] = labels[(x, side)]
    return out


class TestAssignGroups:
    def test_quadruped_trot(self):
        g = neutral_genome()
        groups = assign_groups(4, False)
        pos = label_positions(g)
        assert groups[pos["FL"]] == 1
        assert groups[pos["FR"]] == 2
        assert groups[pos["RR"]] == 1
        assert groups[pos["RL"]] == 2

    def test_two_legs(self):
        leg = LegGenome((LinkGenome(4, 1.0), LinkGenome(4, 1.0)))
        g = Genome(3, (1.0, 1.0, 1.0), 2, False, (leg, leg))
        groups = assign_groups(2, False)
        pos = label_positions(g)
        assert groups[pos["FL"]] == 1
        assert groups[pos["FR"]] == 2

    def test_five_legs_three_right(self):
        leg = LegGenome((LinkGenome(4, 1.0), LinkGenome(4, 1.0)))
        g = Genome(3, (1.0, 1.0, 1.0), 5, False, (leg,) * 5)
        groups = assign_groups(5, False)
        pos = label_positions(g)
        assert groups[pos["FL"]] == 1
        assert groups[pos["FR"]] == 2
        assert groups[pos["MR"]] == 1
        assert groups[pos["RR"]] == 2
        assert groups[pos["RL"]] == 1

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            assign_groups(7, False)


class TestGroupSequence:
    def test_sequences(self):
        assert group_sequence(1) == (1, 2, 3)
        assert group_sequence(2) == (2, 3, 1)

    def test_cyclic(self):
        seq = group_sequence(1)
        assert seq[(4 - 1) % 3] == 1  # step 4 wraps to M1
        assert group_sequence(2)[0] == 2
        assert group_sequence(2)[2] == 1


class TestGaitTable:
    def test_default_shape(self):
        assert len(DEFAULT_GAIT.targets_2link) == 3
        assert len(DEFAULT_GAIT.targets_3link) == 3

    def test_rejects_out_of_range_angle(self):
        with pytest.raises(ValueError):
            GaitTable(targets_2link=((4.0, 0.0), (0.0, 0.0), (0.0, 0.0)))

    def test_rejects_wrong_motion_count(self):
        with pytest.raises(ValueError):
            GaitTable(targets_2link=((0.0, 0.0), (0.0, 0.0)))

    def test_config_round_trip(self, tmp_path):
        path = tmp_path / "gait.json"
        path.write_text(
            json.dumps(
                {
                    "targets_2link": [[-0.5, 0.8], [0.3, 0.2], [0.0, 0.0]],
                    "targets_3link": [[-0.5, 0.8, -0.2], [0.3, 0.2, 0.1], [0.0, 0.0, 0.0]],
                }
            ),
            encoding="utf-8",
        )
        t = load_gait_config(str(path))
        assert t.targets_2link[0] == (-0.5, 0.8)


class TestStepController:
    def test_advances_when_on_target(self):
        g = neutral_genome()
        zero = GaitTable(
            targets_2link=((0.0, 0.0),) * 3, targets_3link=((0.0, 0.0, 0.0),) * 3
        )
        s = make_controller(g, gait=zero)
        step_controller(s, DT)
        # angles start exactly on the all-zero targets -> both groups advance
        assert s.advanced_last_step == (True, True)

    def test_velocity_clamp_on_large_error(self):
        g = neutral_genome()
        big = GaitTable(
            targets_2link=((3.0, 3.0),) * 3, targets_3link=((3.0, 3.0, 3.0),) * 3
        )
        s = make_controller(g, gait=big)
        step_controller(s, DT)
        # commanded velocity for a 3 rad error would be 6 rad/s; the clamp
        # keeps the realized velocity inside the limit
        assert np.all(np.abs(s.vel) <= MAX_JOINT_VEL + 1e-15)

    def test_velocity_clamp_holds_over_30s(self):
        rng = np.random.default_rng(31)
        g = random_genome(rng)
        s = make_controller(g)
        for _ in range(6000):
            step_controller(s, DT)
            assert np.all(np.abs(s.vel) <= MAX_JOINT_VEL + 1e-15)

    def test_timeout_forces_advance(self):
        # hold every joint far off target so no group ever becomes ready,
        # then pretend group 1 just finished: group 0 must advance exactly
        # when its timer hits the 3 s mark
        g = neutral_genome()
        s = make_controller(g)
        s.timer[0] = 0
        steps = timeout_steps(DT)
        for i in range(1, steps + 1):
            s.theta[:] = -3.0
            s.vel[:] = 0.0
            s.vel_int[:] = 0.0
            before = s.motion_idx.copy()
            step_controller(s, DT)
            if i < steps:
                assert np.array_equal(s.motion_idx, before)
            else:
                assert s.motion_idx[0] == (before[0] + 1) % 3
                assert s.motion_idx[1] == before[1]
        # group 0's advance armed group 1's timer in turn
        assert s.timer[1] == 0 and s.timer[0] == -1

    def test_at_most_one_advance_per_step(self):
        rng = np.random.default_rng(32)
        g = random_genome(rng)
        s = make_controller(g)
        prev = s.motion_idx.copy()
        for _ in range(4000):
            step_controller(s, DT)
            jump = (s.motion_idx - prev) % 3
            assert np.all(jump <= 1)
            prev = s.motion_idx.copy()

    def test_same_group_same_link_count_identical_trajectories(self):
        # legs in one group with equal link counts share targets and dynamics
        g = neutral_genome()
        s = make_controller(g)
        m = build_phenotype(g)
        joints_of = {}
        j = 0
        for i, leg in enumerate(m.legs):
            joints_of[i] = list(range(j, j + len(leg.links)))
            j += len(leg.links)
        group_of_leg = [s.joint_group[joints_of[i][0]] for i in range(4)]
        partners = [
            (a, b)
            for a in range(4)
            for b in range(a + 1, 4)
            if group_of_leg[a] == group_of_leg[b]
        ]
        assert partners
        for _ in range(3000):
            step_controller(s, DT)
            for a, b in partners:
                assert np.array_equal(s.theta[joints_of[a]], s.theta[joints_of[b]])

    def test_pure_function_of_state(self):
        g = neutral_genome()
        a = make_controller(g)
        b = make_controller(g)
        for _ in range(500):
            step_controller(a, DT)
            step_controller(b, DT)
        assert np.array_equal(a.theta, b.theta)
        assert np.array_equal(a.motion_idx, b.motion_idx)

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            step_controller(make_controller(neutral_genome()), 0.0)
