"""Quasi-static anchor-model locomotion on a heightfield.

Stance feet pin world points; each step the body takes the least-squares
planar rigid transform that keeps anchored feet on their pins, the body
height follows the lowest anchored foot, and airborne robots fall
ballistically. Roll and pitch stay zero. Runs are bit-deterministic for
identical inputs.

The batch path goes through a flat kernel (numba-compiled when available,
see _core.py); `step` and `initial_pose` provide the same semantics on
readable state objects and are cross-checked against the kernel in tests.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .controller import (
    DEFAULT_GAIT,
    INTEGRATOR_CLAMP,
    KI_POS,
    KI_VEL,
    KP_POS,
    KP_VEL,
    MAX_JOINT_VEL,
    SETTLE_TOL,
    ControllerState,
    GaitTable,
    make_controller,
    step_controller,
    timeout_steps,
)
from .genome import Genome, check_valid
from .morphology import Morphology, build_phenotype
from .terrain import GROUND, SINE, VALLEY, Terrain, in_bounds

_KIND_CODE = {GROUND: 0, SINE: 1, VALLEY: 2}

JIT_ENABLED = False
_sim_core = _core.sim_core
if not os.environ.get("LEGWORK_NO_JIT"):
    try:
        from numba import njit

        _core.floor_height = njit(cache=True)(_core.floor_height)
        _sim_core = njit(cache=True, nogil=True)(_core.sim_core)
        JIT_ENABLED = True
    except ImportError:
        pass


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.005  # s
    duration: float = 30.0  # s
    frame_period: float = 0.05  # s between stored frames
    contact_eps: float = 0.25  # cm
    drag: float = 0.3
    gravity: float = 981.0  # cm/s^2
    kill_depth: float = 5.0  # cm below local terrain counts as a fall
    start: tuple[float, float] = (0.0, 0.0)
    record_frames: bool = True

    @property
    def n_steps(self) -> int:
        return round(self.duration / self.dt)

    @property
    def frame_every(self) -> int:
        return round(self.frame_period / self.dt)


DEFAULT_SIM = SimConfig()


@dataclass
class SimState:
    body_x: float
    body_y: float
    body_z: float
    yaw: float
    v_z: float
    ctrl: ControllerState | None
    anchors: dict[int, tuple[float, float]] = field(default_factory=dict)
    elapsed: float = 0.0
    body_contact: bool = False


@dataclass(frozen=True)
class SimResult:
    fitness: float
    dx: float
    dy: float
    fell_off: bool
    frames: np.ndarray  # (n, 5 + n_joints): t, x, y, z, yaw, joint angles
    n_joints: int
    max_step_displacement: float


def fitness(dx: float, dy: float) -> float:
    """Forward progress penalized by half the sideways divergence."""
    return dx - 0.5 * abs(dy)


def _contact_floor(t: Terrain, x: float, y: float) -> float:
    return _core.floor_height(
        _KIND_CODE[t.kind], t.amplitude, t.wavelength, t.floor_width / 2.0, x, y
    )


def initial_pose(m: Morphology, t: Terrain, ctrl: ControllerState | None = None,
                 start: tuple[float, float] = (0.0, 0.0)) -> SimState:
    """Zero joints, body over the start point, the longest leg's foot exactly
    2 cm above the terrain directly beneath it (ties: first in perimeter)."""
    longest = max(range(len(m.legs)), key=lambda i: (m.legs[i].length, -i))
    leg = m.legs[longest]
    fx = start[0] + leg.attach[0]
    fy = start[1] + leg.attach[1]
    h = _contact_floor(t, fx, fy)
    return SimState(
        body_x=start[0],
        body_y=start[1],
        body_z=h + 2.0 + leg.length,
        yaw=0.0,
        v_z=0.0,
        ctrl=ctrl,
    )


def _feet_world(s: SimState, m: Morphology) -> list[tuple[float, float, float, float]]:
    """(body_frame_x, world_x, world_y, world_z) per leg, perimeter order."""
    c = math.cos(s.yaw)
    sn = math.sin(s.yaw)
    theta = s.ctrl.theta
    out = []
    j = 0
    for leg in m.legs:
        phi = 0.0
        fx = leg.attach[0]
        fz = 0.0
        for link in leg.links:
            phi += theta[j]
            fx += link.dims[2] * math.sin(phi)
            fz -= link.dims[2] * math.cos(phi)
            j += 1
        ay = leg.attach[1]
        out.append((fx, s.body_x + c * fx - sn * ay, s.body_y + sn * fx + c * ay, s.body_z + fz))
    return out


def step(s: SimState, m: Morphology, t: Terrain, cfg: SimConfig = DEFAULT_SIM) -> SimState:
    """One fixed step, in place: controller, FK, contact transitions, planar
    registration, vertical placement, body drag, wall sliding."""
    dt = cfg.dt
    half_w = t.floor_width / 2.0
    bx, by, bz = m.body_dims
    half_x, half_y, half_z = bx / 2.0, by / 2.0, bz / 2.0

    step_controller(s.ctrl, dt)

    feet = _feet_world(s, m)

    for i, (_, wx, wy, wz) in enumerate(feet):
        if t.kind == VALLEY and wy > half_w:
            contact = False
        else:
            contact = wz <= _contact_floor(t, wx, wy) + cfg.contact_eps
        if contact:
            if i not in s.anchors:
                s.anchors[i] = (wx, wy)
        else:
            s.anchors.pop(i, None)

    pre_x, pre_y = s.body_x, s.body_y
    s.body_contact = False

    if s.anchors:
        ids = sorted(s.anchors)
        k = len(ids)
        pbx = sum(feet[i][1] for i in ids) / k
        pby = sum(feet[i][2] for i in ids) / k
        qbx = sum(s.anchors[i][0] for i in ids) / k
        qby = sum(s.anchors[i][1] for i in ids) / k
        rot = 0.0
        if k >= 2:
            sdot = 0.0
            scross = 0.0
            for i in ids:
                px = feet[i][1] - pbx
                py = feet[i][2] - pby
                qx = s.anchors[i][0] - qbx
                qy = s.anchors[i][1] - qby
                sdot += px * qx + py * qy
                scross += px * qy - py * qx
            rot = math.atan2(scross, sdot)
        cr, sr = math.cos(rot), math.sin(rot)
        nx = qbx + cr * (s.body_x - pbx) - sr * (s.body_y - pby)
        ny = qby + sr * (s.body_x - pbx) + cr * (s.body_y - pby)
        s.body_x, s.body_y = nx, ny
        s.yaw += rot

        c, sn = math.cos(s.yaw), math.sin(s.yaw)
        min_clear = math.inf
        for i in ids:
            fx = feet[i][0]
            ay = m.legs[i].attach[1]
            wx = s.body_x + c * fx - sn * ay
            wy = s.body_y + sn * fx + c * ay
            clear = feet[i][3] - _contact_floor(t, wx, wy)
            min_clear = min(min_clear, clear)
        s.body_z -= min_clear
        s.v_z = 0.0

        if s.body_z - half_z <= _contact_floor(t, s.body_x, s.body_y):
            s.body_contact = True
            s.body_x = pre_x + cfg.drag * (s.body_x - pre_x)
            s.body_y = pre_y + cfg.drag * (s.body_y - pre_y)
    else:
        s.v_z -= cfg.gravity * dt
        s.body_z += s.v_z * dt
        min_clear = math.inf
        for i, (_, wx, wy, wz) in enumerate(feet):
            if t.kind == VALLEY and wy > half_w:
                continue
            min_clear = min(min_clear, (wz + s.v_z * dt) - _contact_floor(t, wx, wy))
        body_clear = (s.body_z - half_z) - _contact_floor(t, s.body_x, s.body_y)
        if body_clear < min_clear:
            min_clear = body_clear
        if min_clear < 0.0:
            s.body_z -= min_clear
            s.v_z = 0.0

    if t.kind == VALLEY:
        c, sn = math.cos(s.yaw), math.sin(s.yaw)
        max_y = -math.inf
        for i, leg in enumerate(m.legs):
            max_y = max(max_y, s.body_y + sn * feet[i][0] + c * leg.attach[1])
        for cx in (half_x, -half_x):
            for cy in (half_y, -half_y):
                max_y = max(max_y, s.body_y + sn * cx + c * cy)
        if max_y > half_w:
            max_y -= s.body_y - pre_y
            s.body_y = pre_y
            if max_y > half_w:
                s.body_y -= max_y - half_w

    s.elapsed += dt
    return s


def _pack(g: Genome, gait: GaitTable):
    m = build_phenotype(g)
    ctrl = make_controller(g, m, gait)
    joint_off = np.zeros(len(m.legs) + 1, dtype=np.int64)
    link_len = []
    attach_x = np.zeros(len(m.legs))
    attach_y = np.zeros(len(m.legs))
    for i, leg in enumerate(m.legs):
        joint_off[i + 1] = joint_off[i] + len(leg.links)
        attach_x[i] = leg.attach[0]
        attach_y[i] = leg.attach[1]
        link_len.extend(link.dims[2] for link in leg.links)
    return m, ctrl, joint_off, np.array(link_len), attach_x, attach_y


def simulate(
    g: Genome,
    t: Terrain,
    gait: GaitTable = DEFAULT_GAIT,
    cfg: SimConfig = DEFAULT_SIM,
    backend: str = "auto",
) -> SimResult:
    """Run the full fixed-step simulation and score it.

    Terminates early when the body origin leaves the terrain bounds or drops
    below the kill plane (both count as falling off). Identical inputs give
    bit-identical results.
    """
    check_valid(g)
    m, ctrl, joint_off, link_len, attach_x, attach_y = _pack(g, gait)
    n_joints = int(joint_off[-1])
    n_steps = cfg.n_steps
    frame_every = cfg.frame_every if cfg.record_frames else 0
    max_frames = n_steps // max(frame_every, 1) + 1 if frame_every else 1
    frames = np.zeros((max_frames, 5 + n_joints))

    core = _core.sim_core if backend == "python" else _sim_core
    bx, by, bz = m.body_dims
    x_min, x_max, y_min, y_max = t.bounds
    dx, dy, fell, n_frames, fault, max_disp = core(
        joint_off,
        ctrl.joint_group,
        link_len,
        attach_x,
        attach_y,
        bx / 2.0,
        by / 2.0,
        bz / 2.0,
        ctrl.targets,
        cfg.dt,
        MAX_JOINT_VEL,
        KP_POS,
        KI_POS,
        KP_VEL,
        KI_VEL,
        INTEGRATOR_CLAMP,
        SETTLE_TOL,
        timeout_steps(cfg.dt),
        _KIND_CODE[t.kind],
        t.amplitude,
        t.wavelength,
        t.floor_width / 2.0,
        x_min,
        x_max,
        y_min,
        y_max,
        n_steps,
        cfg.gravity,
        cfg.contact_eps,
        cfg.drag,
        cfg.kill_depth,
        cfg.start[0],
        cfg.start[1],
        frame_every,
        frames,
    )
    if fault:
        raise RuntimeError("simulation produced a non-finite pose")
    return SimResult(
        fitness=fitness(dx, dy),
        dx=dx,
        dy=dy,
        fell_off=bool(fell),
        frames=frames[:n_frames],
        n_joints=n_joints,
        max_step_displacement=max_disp,
    )


def run_python_steps(
    g: Genome,
    t: Terrain,
    n: int,
    gait: GaitTable = DEFAULT_GAIT,
    cfg: SimConfig = DEFAULT_SIM,
) -> SimState:
    """Drive the object-level step() n times; used by tests to pin the kernel
    against the readable implementation."""
    m = build_phenotype(g)
    ctrl = make_controller(g, m, gait)
    s = initial_pose(m, t, ctrl, cfg.start)
    for _ in range(n):
        step(s, m, t, cfg)
        if not in_bounds(t, s.body_x, s.body_y):
            break
    return s
