#!/usr/bin/env python3
"""Drive the study-session API the way the browser UI does, in-process.

Creates a session, walks tutorial -> training -> the three tasks in the
server's randomized order, submits a few designs per environment, then
exports the per-environment design pools.
"""
import numpy as np

from legwork.genome import mutate, neutral_genome, to_record
from legwork.service import Service

rng = np.random.default_rng(3)
service = Service(rng_seed=99)

view = service.create_session("demo-participant")
sid = view["session_id"]
print("environment order:", view["environment_order"])

service.advance(sid)  # tutorial -> training
out = service.simulate_design(sid, "training", to_record(neutral_genome()))
print(f"training sim: fitness {out['fitness']:.2f} (does not count, never recorded)")

service.advance(sid)  # training -> first task
for round_idx in range(3):
    env = service.get_session(sid).current_env()
    for k in range(3):
        design = to_record(mutate(neutral_genome(), 0.3, rng))
        out = service.simulate_design(sid, env, design)
        print(
            f"{env:>7} update {k + 1}: fitness {out['fitness']:7.2f}  "
            f"remaining {out['remaining']}"
        )
    service.advance(sid)

print("phase:", service.get_session(sid).phase)
for env in ("ground", "sine", "valley"):
    pool = service.export_pool(env)
    print(f"pool[{env}]: {len(pool)} records (3 updates + 1 neutral baseline)")
