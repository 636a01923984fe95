"""Flat simulation kernel shared by the JIT and pure-Python backends.

One function runs the whole fixed-step loop on primitive arrays so it can be
compiled by numba unchanged. The public, object-shaped API lives in
simulator.py; tests cross-check the two against each other step for step.

Terrain kinds: 0 ground, 1 sine, 2 valley. In the valley, points beyond the
vertical wall plane (y > half_w) never make floor contact, and any step that
would push a body/foot point past the plane has its y displacement cancelled.
"""
from __future__ import annotations

import math

import numpy as np


def floor_height(kind, amp, wav, half_w, x, y):
    if kind == 1:
        return amp * math.sin(2.0 * math.pi * x / wav)
    if kind == 2:
        if y < -half_w:
            return -y - half_w
        return 0.0
    return 0.0


def sim_core(
    joint_off,
    joint_group,
    link_len,
    attach_x,
    attach_y,
    half_x,
    half_y,
    half_z,
    targets,
    dt,
    vmax,
    kp_pos,
    ki_pos,
    kp_vel,
    ki_vel,
    int_clamp,
    settle_tol,
    timeout_steps,
    kind,
    amp,
    wav,
    half_w,
    x_min,
    x_max,
    y_min,
    y_max,
    n_steps,
    gravity,
    contact_eps,
    drag,
    kill_depth,
    start_x,
    start_y,
    frame_every,
    frames,
):
    n_legs = attach_x.shape[0]
    n_joints = link_len.shape[0]

    theta = np.zeros(n_joints)
    vel = np.zeros(n_joints)
    vel_int = np.zeros(n_joints)
    pos_int = np.zeros(n_joints)
    cur_tgt = np.zeros(n_joints)
    motion_idx = np.zeros(2, dtype=np.int64)
    timer = np.full(2, -1, dtype=np.int64)

    foot_bx = np.zeros(n_legs)
    foot_wx = np.zeros(n_legs)
    foot_wy = np.zeros(n_legs)
    foot_wz = np.zeros(n_legs)
    anchored = np.zeros(n_legs, dtype=np.int64)
    anchor_x = np.zeros(n_legs)
    anchor_y = np.zeros(n_legs)

    # Initial placement: zero joints point the legs straight down; body height
    # puts the longest leg's foot exactly 2 cm above the terrain beneath it.
    longest = 0
    max_len = -1.0
    for i in range(n_legs):
        total = 0.0
        for j in range(joint_off[i], joint_off[i + 1]):
            total += link_len[j]
        if total > max_len:
            max_len = total
            longest = i
    h0 = floor_height(
        kind, amp, wav, half_w, start_x + attach_x[longest], start_y + attach_y[longest]
    )
    body_x = start_x
    body_y = start_y
    body_z = h0 + 2.0 + max_len
    psi = 0.0
    v_z = 0.0

    fell = 0
    fault = 0
    max_disp = 0.0
    n_frames = 0
    if frame_every > 0:
        frames[0, 0] = 0.0
        frames[0, 1] = body_x
        frames[0, 2] = body_y
        frames[0, 3] = body_z
        frames[0, 4] = psi
        for j in range(n_joints):
            frames[0, 5 + j] = theta[j]
        n_frames = 1

    for step in range(1, n_steps + 1):
        # --- 1. controller ---
        for gid in range(2):
            if timer[gid] >= 0:
                timer[gid] += 1
        for j in range(n_joints):
            gid = joint_group[j]
            row = (motion_idx[gid] + gid) % 3
            tgt = targets[row, j]
            cur_tgt[j] = tgt
            err = tgt - theta[j]
            p = pos_int[j] + err * dt
            if p > int_clamp:
                p = int_clamp
            elif p < -int_clamp:
                p = -int_clamp
            pos_int[j] = p
            v_cmd = kp_pos * err + ki_pos * p
            if v_cmd > vmax:
                v_cmd = vmax
            elif v_cmd < -vmax:
                v_cmd = -vmax
            v_err = v_cmd - vel[j]
            q = vel_int[j] + v_err * dt
            if q > int_clamp:
                q = int_clamp
            elif q < -int_clamp:
                q = -int_clamp
            vel_int[j] = q
            v = vel[j] + (kp_vel * v_err + ki_vel * q) * dt
            if v > vmax:
                v = vmax
            elif v < -vmax:
                v = -vmax
            vel[j] = v
            theta[j] += v * dt

        ready0 = True
        ready1 = True
        for j in range(n_joints):
            if abs(cur_tgt[j] - theta[j]) > settle_tol:
                if joint_group[j] == 0:
                    ready0 = False
                else:
                    ready1 = False
        adv0 = ready0 or (timer[0] >= timeout_steps)
        adv1 = ready1 or (timer[1] >= timeout_steps)
        if adv0:
            motion_idx[0] = (motion_idx[0] + 1) % 3
        if adv1:
            motion_idx[1] = (motion_idx[1] + 1) % 3
        # arm each timer on the other group's advance; own advance clears it
        if adv1:
            timer[0] = 0
        if adv0:
            timer[0] = -1
            timer[1] = 0
        if adv1:
            timer[1] = -1

        # --- 2. forward kinematics with the pre-step body pose ---
        c = math.cos(psi)
        s = math.sin(psi)
        for i in range(n_legs):
            phi = 0.0
            fx = attach_x[i]
            fz = 0.0
            for j in range(joint_off[i], joint_off[i + 1]):
                phi += theta[j]
                fx += link_len[j] * math.sin(phi)
                fz -= link_len[j] * math.cos(phi)
            foot_bx[i] = fx
            foot_wx[i] = body_x + c * fx - s * attach_y[i]
            foot_wy[i] = body_y + s * fx + c * attach_y[i]
            foot_wz[i] = body_z + fz

        # --- 3. contact transitions ---
        for i in range(n_legs):
            if kind == 2 and foot_wy[i] > half_w:
                contact = False
            else:
                h = floor_height(kind, amp, wav, half_w, foot_wx[i], foot_wy[i])
                contact = foot_wz[i] <= h + contact_eps
            if contact:
                if anchored[i] == 0:
                    anchored[i] = 1
                    anchor_x[i] = foot_wx[i]
                    anchor_y[i] = foot_wy[i]
            else:
                anchored[i] = 0

        pre_x = body_x
        pre_y = body_y
        n_anchors = 0
        for i in range(n_legs):
            n_anchors += anchored[i]

        if n_anchors > 0:
            # --- 4. planar rigid transform pinning the anchored feet ---
            pbx = 0.0
            pby = 0.0
            qbx = 0.0
            qby = 0.0
            for i in range(n_legs):
                if anchored[i] == 1:
                    pbx += foot_wx[i]
                    pby += foot_wy[i]
                    qbx += anchor_x[i]
                    qby += anchor_y[i]
            pbx /= n_anchors
            pby /= n_anchors
            qbx /= n_anchors
            qby /= n_anchors
            rot = 0.0
            if n_anchors >= 2:
                sdot = 0.0
                scross = 0.0
                for i in range(n_legs):
                    if anchored[i] == 1:
                        px = foot_wx[i] - pbx
                        py = foot_wy[i] - pby
                        qx = anchor_x[i] - qbx
                        qy = anchor_y[i] - qby
                        sdot += px * qx + py * qy
                        scross += px * qy - py * qx
                rot = math.atan2(scross, sdot)
            cr = math.cos(rot)
            sr = math.sin(rot)
            nx = qbx + cr * (body_x - pbx) - sr * (body_y - pby)
            ny = qby + sr * (body_x - pbx) + cr * (body_y - pby)
            body_x = nx
            body_y = ny
            psi += rot

            # --- 5. vertical: lowest anchored foot exactly on the terrain ---
            c = math.cos(psi)
            s = math.sin(psi)
            min_clear = 1e300
            for i in range(n_legs):
                if anchored[i] == 1:
                    wx = body_x + c * foot_bx[i] - s * attach_y[i]
                    wy = body_y + s * foot_bx[i] + c * attach_y[i]
                    h = floor_height(kind, amp, wav, half_w, wx, wy)
                    clear = foot_wz[i] - h
                    if clear < min_clear:
                        min_clear = clear
            body_z -= min_clear
            v_z = 0.0

            # --- 6. body drag when the underside touches ---
            hb = floor_height(kind, amp, wav, half_w, body_x, body_y)
            if body_z - half_z <= hb:
                body_x = pre_x + drag * (body_x - pre_x)
                body_y = pre_y + drag * (body_y - pre_y)
        else:
            # ballistic drop until a foot or the body underside touches
            v_z -= gravity * dt
            body_z += v_z * dt
            min_clear = 1e300
            for i in range(n_legs):
                if kind == 2 and foot_wy[i] > half_w:
                    continue
                h = floor_height(kind, amp, wav, half_w, foot_wx[i], foot_wy[i])
                clear = (foot_wz[i] + v_z * dt) - h
                if clear < min_clear:
                    min_clear = clear
            hb = floor_height(kind, amp, wav, half_w, body_x, body_y)
            body_clear = (body_z - half_z) - hb
            if body_clear < min_clear:
                min_clear = body_clear
            if min_clear < 0.0:
                body_z -= min_clear
                v_z = 0.0

        # --- 7. the valley's vertical wall is impassable: cancel crossing y ---
        if kind == 2:
            c = math.cos(psi)
            s = math.sin(psi)
            max_y = -1e300
            for i in range(n_legs):
                wy = body_y + s * foot_bx[i] + c * attach_y[i]
                if wy > max_y:
                    max_y = wy
            for corner in range(4):
                cx = half_x if corner < 2 else -half_x
                cy = half_y if corner % 2 == 0 else -half_y
                wy = body_y + s * cx + c * cy
                if wy > max_y:
                    max_y = wy
            if max_y > half_w:
                shift = body_y - pre_y
                body_y = pre_y
                max_y -= shift
                if max_y > half_w:
                    body_y -= max_y - half_w

        disp = math.hypot(body_x - pre_x, body_y - pre_y)
        if disp > max_disp:
            max_disp = disp

        if not (
            math.isfinite(body_x)
            and math.isfinite(body_y)
            and math.isfinite(body_z)
            and math.isfinite(psi)
        ):
            fault = 1
            break

        if frame_every > 0 and step % frame_every == 0:
            frames[n_frames, 0] = step * dt
            frames[n_frames, 1] = body_x
            frames[n_frames, 2] = body_y
            frames[n_frames, 3] = body_z
            frames[n_frames, 4] = psi
            for j in range(n_joints):
                frames[n_frames, 5 + j] = theta[j]
            n_frames += 1

        inside = x_min <= body_x and body_x <= x_max and y_min <= body_y and body_y <= y_max
        if not inside:
            fell = 1
            break
        hb = floor_height(kind, amp, wav, half_w, body_x, body_y)
        if body_z < hb - kill_depth:
            fell = 1
            break

    dx = body_x - start_x
    dy = body_y - start_y
    return dx, dy, fell, n_frames, fault, max_disp
