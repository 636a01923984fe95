"""Deterministic gait controller.

Legs split into two groups that cycle through three joint-target motions,
group 1 running M1 M2 M3 while group 2 runs M2 M3 M1. A group advances when
every one of its joints is within 0.01 rad of target, or 3 s after the other
group last advanced, whichever comes first. Each joint runs a position loop
(kp=2, ki=0) cascaded into a velocity PI tracker (kp=10, ki=0.3) with the
commanded and actual velocity clamped to 2 rad/s.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .genome import Genome, grouping_reflected
from .morphology import Morphology, build_phenotype, perimeter_order

MAX_JOINT_VEL = 2.0  # rad/s
KP_POS = 2.0
KI_POS = 0.0
KP_VEL = 10.0
KI_VEL = 0.3
INTEGRATOR_CLAMP = 2.0
SETTLE_TOL = 0.01  # rad
GROUP_TIMEOUT = 3.0  # s


@dataclass(frozen=True)
class GaitTable:
    """Three motions of joint targets (rad) per leg link count.

    The default values trace a lift-swing-stance cycle; they are a documented
    choice and loadable from a config file. Positive angles swing the foot
    toward +x (forward).
    """

    targets_2link: tuple[tuple[float, float], ...] = (
        (-0.6, 0.9),
        (0.4, 0.3),
        (0.0, 0.0),
    )
    targets_3link: tuple[tuple[float, float, float], ...] = (
        (-0.6, 0.9, -0.3),
        (0.4, 0.3, 0.1),
        (0.0, 0.0, 0.0),
    )

    def __post_init__(self):
        for name, table, width in (
            ("targets_2link", self.targets_2link, 2),
            ("targets_3link", self.targets_3link, 3),
        ):
            if len(table) != 3:
                raise ValueError(f"{name} must define exactly 3 motions")
            for motion in table:
                if len(motion) != width:
                    raise ValueError(f"{name} motions need {width} angles")
                for a in motion:
                    if not -math.pi <= a <= math.pi:
                        raise ValueError(f"{name} angle out of [-pi, pi]: {a}")

    def targets_for(self, n_links: int) -> tuple[tuple[float, ...], ...]:
        return self.targets_2link if n_links == 2 else self.targets_3link


DEFAULT_GAIT = GaitTable()


def load_gait_config(path: str) -> GaitTable:
    with open(path, encoding="utf-8") as f:
        cfg = json.load(f)
    return GaitTable(
        targets_2link=tuple(tuple(m) for m in cfg["targets_2link"]),
        targets_3link=tuple(tuple(m) for m in cfg["targets_3link"]),
    )


def group_sequence(group: int) -> tuple[int, int, int]:
    """Cyclic motion order (1-based motion numbers) for a group."""
    if group == 1:
        return (1, 2, 3)
    if group == 2:
        return (2, 3, 1)
    raise ValueError(f"group must be 1 or 2, got {group}")


def assign_groups(num_legs: int, layout_mirror: bool, reflected: bool = False) -> list[int]:
    """Group id (1 or 2) per genome leg index.

    Group 1 sits at the perimeter start (front-left by default) and groups
    alternate along the clockwise perimeter. The reflected orientation starts
    front-right and walks counter-clockwise; the simulator selects it from
    genome content so that mirrored designs keep their per-leg phases.
    """
    if not 2 <= num_legs <= 6:
        raise ValueError(f"num_legs out of 2-6: {num_legs}")
    order = perimeter_order(num_legs, layout_mirror, reflected)
    groups = [0] * num_legs
    for pos, leg_idx in enumerate(order):
        groups[leg_idx] = 1 + pos % 2
    return groups


@dataclass
class ControllerState:
    """Joint-space state for one simulated robot.

    Arrays are indexed by joint in morphology (perimeter) order. Group timers
    count integer steps since the *other* group last advanced (-1 = disarmed)
    so the 3 s timeout fires exactly at 600 steps of 0.005 s.
    """

    targets: np.ndarray  # (3, J) per motion index
    joint_group: np.ndarray  # (J,) 0 or 1
    seq: np.ndarray  # (2, 3) motion index cycles
    theta: np.ndarray
    vel: np.ndarray
    vel_int: np.ndarray
    pos_int: np.ndarray
    motion_idx: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=np.int64))
    timer: np.ndarray = field(default_factory=lambda: np.full(2, -1, dtype=np.int64))
    advanced_last_step: tuple[bool, bool] = (False, False)

    def copy(self) -> "ControllerState":
        return ControllerState(
            self.targets, self.joint_group, self.seq,
            self.theta.copy(), self.vel.copy(), self.vel_int.copy(), self.pos_int.copy(),
            self.motion_idx.copy(), self.timer.copy(), self.advanced_last_step,
        )


def make_controller(
    g: Genome,
    morph: Morphology | None = None,
    gait: GaitTable = DEFAULT_GAIT,
    reflected: bool | None = None,
) -> ControllerState:
    morph = morph or build_phenotype(g)
    if reflected is None:
        reflected = grouping_reflected(g)
    groups = assign_groups(g.num_legs, g.layout_mirror, reflected)

    joint_group: list[int] = []
    target_cols: list[tuple[float, float, float]] = []
    for leg in morph.legs:
        motions = gait.targets_for(len(leg.links))
        gid = groups[leg.genome_index] - 1
        for j in range(len(leg.links)):
            joint_group.append(gid)
            target_cols.append(tuple(motions[m][j] for m in range(3)))

    n_joints = len(joint_group)
    targets = np.empty((3, n_joints))
    for j, col in enumerate(target_cols):
        targets[:, j] = col
    seq = np.array([[0, 1, 2], [1, 2, 0]], dtype=np.int64)
    zeros = lambda: np.zeros(n_joints)
    return ControllerState(
        targets, np.array(joint_group, dtype=np.int64), seq,
        zeros(), zeros(), zeros(), zeros(),
    )


def timeout_steps(dt: float) -> int:
    return round(GROUP_TIMEOUT / dt)


def step_controller(s: ControllerState, dt: float) -> np.ndarray:
    """Advance the controller one step in place; returns the joint angles."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    limit = timeout_steps(dt)
    for gid in range(2):
        if s.timer[gid] >= 0:
            s.timer[gid] += 1

    n = s.theta.shape[0]
    current_targets = np.empty(n)
    for j in range(n):
        gid = s.joint_group[j]
        tgt = s.targets[s.seq[gid, s.motion_idx[gid]], j]
        current_targets[j] = tgt

        err = tgt - s.theta[j]
        s.pos_int[j] = _clamp(s.pos_int[j] + err * dt, INTEGRATOR_CLAMP)
        v_cmd = _clamp(KP_POS * err + KI_POS * s.pos_int[j], MAX_JOINT_VEL)

        v_err = v_cmd - s.vel[j]
        s.vel_int[j] = _clamp(s.vel_int[j] + v_err * dt, INTEGRATOR_CLAMP)
        s.vel[j] = _clamp(s.vel[j] + (KP_VEL * v_err + KI_VEL * s.vel_int[j]) * dt, MAX_JOINT_VEL)
        s.theta[j] += s.vel[j] * dt

    ready = [True, True]
    for j in range(n):
        if abs(current_targets[j] - s.theta[j]) > SETTLE_TOL:
            ready[s.joint_group[j]] = False

    advance = [
        ready[gid] or (0 <= s.timer[gid] and s.timer[gid] >= limit) for gid in range(2)
    ]
    for gid in range(2):
        if advance[gid]:
            s.motion_idx[gid] = (s.motion_idx[gid] + 1) % 3
    # Two-phase timer update keeps simultaneous advances order-independent:
    # arming by the other group's advance, then own-advance reset wins.
    for gid in range(2):
        if advance[1 - gid]:
            s.timer[gid] = 0
        if advance[gid]:
            s.timer[gid] = -1
    s.advanced_last_step = (advance[0], advance[1])
    return s.theta


def _clamp(v: float, limit: float) -> float:
    return min(max(v, -limit), limit)
