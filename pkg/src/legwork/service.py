"""Wire API backing the designer UI.

Sessions walk a tutorial -> training -> three-task flow with the environment
order randomized server-side; task-phase simulations are capped at 10 per
environment on top of the automatically recorded neutral baseline, and every
recorded design lands in a per-environment pool exportable in the canonical
design-file format. Evolution runs execute on background threads and stream
per-iteration stats plus archive-cell deltas.
"""
from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from . import evolution, runner
from .analysis import SeedRecord, dedup_pool, select_seeds
from .genome import Genome, from_record, neutral_genome, to_record, validate
from .runner import CONDITIONS, make_evaluator, pool_to_records, seed_pairs
from .simulator import SimConfig, simulate
from .terrain import make_terrain, terrain_record

_NO_FRAMES = SimConfig(record_frames=False)

TASK_ENVIRONMENTS = ("ground", "sine", "valley")
TRAINING_ENV = "training"
SIMULATES_PER_ENV = 10


class ServiceError(Exception):
    def __init__(self, code: str, message: str, status: int = 400):
        self.code = code
        self.status = status
        super().__init__(message)

    def payload(self) -> dict:
        return {"error": self.code, "message": str(self)}


@dataclass
class EnvProgress:
    current_design: Genome
    simulate_count: int = 0
    records: list[SeedRecord] = field(default_factory=list)
    last_genome: Genome | None = None


@dataclass
class Session:
    session_id: str
    participant_id: str
    env_order: list[str]
    phase: str = "tutorial"
    task_index: int = 0
    envs: dict[str, EnvProgress] = field(default_factory=dict)
    nonces: dict[str, dict] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def current_env(self) -> str | None:
        if self.phase == "training":
            return TRAINING_ENV
        if self.phase == "tasks":
            return self.env_order[self.task_index]
        return None

    def view(self) -> dict:
        return {
            "session_id": self.session_id,
            "participant_id": self.participant_id,
            "environment_order": self.env_order,
            "phase": self.phase,
            "current_environment": self.current_env(),
            "simulate_counts": {
                env: p.simulate_count for env, p in self.envs.items()
            },
            "remaining": self.remaining(),
            "current_design": to_record(self.current_design())
            if self.current_design() is not None
            else None,
        }

    def current_design(self) -> Genome | None:
        env = self.current_env()
        if env is None or env == TRAINING_ENV:
            return neutral_genome() if env == TRAINING_ENV else None
        return self.envs[env].current_design

    def remaining(self) -> int | None:
        env = self.current_env()
        if self.phase != "tasks" or env is None:
            return None
        return SIMULATES_PER_ENV - self.envs[env].simulate_count


@dataclass
class RunHandle:
    run_id: str
    status: str = "running"  # running | done | error
    error: str | None = None
    events: list[dict] = field(default_factory=list)
    thread: threading.Thread | None = None
    condition: str = "h0"
    environment: str = "ground"


class Service:
    """In-process API implementation; the HTTP layer is a thin JSON shim."""

    def __init__(self, rng_seed: int | None = None, data_dir: str | None = None):
        self._rng = np.random.default_rng(rng_seed)
        self._sessions: dict[str, Session] = {}
        self._runs: dict[str, RunHandle] = {}
        self._counter = 0
        self._run_counter = 0
        self._state_lock = threading.Lock()
        self._data_dir = Path(data_dir) if data_dir else None
        if self._data_dir:
            self._data_dir.mkdir(parents=True, exist_ok=True)

    # -- sessions ----------------------------------------------------------

    def create_session(self, participant_id: str) -> dict:
        with self._state_lock:
            self._counter += 1
            sid = f"s{self._counter:04d}"
            order = [TASK_ENVIRONMENTS[i] for i in self._rng.permutation(3)]
        session = Session(sid, participant_id, order)
        for env in TASK_ENVIRONMENTS:
            session.envs[env] = EnvProgress(current_design=neutral_genome())
        self._sessions[sid] = session
        self._persist(session, {"event": "created", "order": order})
        return session.view()

    def get_session(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise ServiceError("unknown", f"no session {session_id}", 404) from None

    def advance(self, session_id: str) -> dict:
        s = self.get_session(session_id)
        if s.phase == "tutorial":
            s.phase = "training"
        elif s.phase == "training":
            s.phase = "tasks"
            s.task_index = 0
            self._enter_environment(s)
        elif s.phase == "tasks":
            if s.task_index + 1 < len(s.env_order):
                s.task_index += 1
                self._enter_environment(s)
            else:
                s.phase = "done"
        else:
            raise ServiceError("sequence", "session already done")
        self._persist(s, {"event": "advance", "phase": s.phase, "env": s.current_env()})
        return s.view()

    def _enter_environment(self, s: Session) -> None:
        # controls reset to the neutral design; its simulated baseline is
        # recorded as iteration 0 without touching the 10-update quota
        env = s.env_order[s.task_index]
        progress = s.envs[env]
        progress.current_design = neutral_genome()
        result = simulate(neutral_genome(), make_terrain(env), cfg=_NO_FRAMES)
        record = SeedRecord(
            user_id=s.participant_id,
            environment=env,
            iteration=0,
            genome=neutral_genome(),
            recorded_fitness=result.fitness,
        )
        progress.records.append(record)
        progress.last_genome = record.genome

    def simulate_design(
        self, session_id: str, environment: str, genome_record: dict, nonce: str | None = None
    ) -> dict:
        s = self.get_session(session_id)
        if nonce is not None and nonce in s.nonces:
            return s.nonces[nonce]
        if not s.lock.acquire(blocking=False):
            raise ServiceError("busy", "a simulation is already in flight", 409)
        try:
            violations = _validate_record(genome_record)
            if violations:
                raise ServiceError("invalid", "; ".join(violations), 422)
            g = from_record(genome_record)

            if s.phase == "training":
                if environment != TRAINING_ENV:
                    raise ServiceError(
                        "sequence", f"training phase simulates on '{TRAINING_ENV}'"
                    )
                result = simulate(g, make_terrain(TRAINING_ENV))
                payload = _sim_payload(result, remaining=None, duplicate=False)
            elif s.phase == "tasks":
                current = s.current_env()
                if environment != current:
                    raise ServiceError(
                        "sequence", f"current environment is '{current}', got '{environment}'"
                    )
                progress = s.envs[environment]
                if progress.simulate_count >= SIMULATES_PER_ENV:
                    raise ServiceError(
                        "quota", f"all {SIMULATES_PER_ENV} updates used for {environment}", 429
                    )
                result = simulate(g, make_terrain(environment))
                progress.simulate_count += 1
                duplicate = progress.last_genome == g
                record = SeedRecord(
                    user_id=s.participant_id,
                    environment=environment,
                    iteration=progress.simulate_count,
                    genome=g,
                    recorded_fitness=result.fitness,
                )
                progress.records.append(record)
                progress.last_genome = g
                progress.current_design = g
                self._persist(
                    s,
                    {
                        "event": "design",
                        "env": environment,
                        "iteration": record.iteration,
                        "fitness": result.fitness,
                        "duplicate": duplicate,
                        "genome": to_record(g),
                    },
                )
                payload = _sim_payload(result, remaining=s.remaining(), duplicate=duplicate)
            else:
                raise ServiceError("phase", f"cannot simulate during '{s.phase}'")
            if nonce is not None:
                s.nonces[nonce] = payload
            return payload
        finally:
            s.lock.release()

    # -- pools ---------------------------------------------------------------

    def export_pool(self, environment: str) -> list[dict]:
        records: list[SeedRecord] = []
        for sid in sorted(self._sessions):
            s = self._sessions[sid]
            progress = s.envs.get(environment)
            if progress:
                records.extend(progress.records)
        return pool_to_records(dedup_pool(records))

    # -- evolution runs -------------------------------------------------------

    def start_run(self, params: dict) -> dict:
        environment = params.get("environment", "ground")
        if environment not in TASK_ENVIRONMENTS:
            raise ServiceError("invalid", f"unknown environment {environment}")
        condition = str(params.get("condition", "h0")).lower()
        if condition not in CONDITIONS:
            raise ServiceError("invalid", f"unknown condition {condition}")
        iterations = int(params.get("iterations", 200))
        seed = int(params.get("seed", 0))
        n_human, cap = CONDITIONS[condition]
        seeds = []
        if n_human:
            pool_records = params.get("seeds")
            if pool_records is None:
                pool_records = self.export_pool(environment)
            pool = runner.load_pool_records(pool_records)
            seeds = seed_pairs(select_seeds(pool, n_human, cap))

        with self._state_lock:
            self._run_counter += 1
            run_id = f"run-{self._run_counter:04d}"
        handle = RunHandle(run_id, condition=condition, environment=environment)
        self._runs[run_id] = handle

        cfg = evolution.RunConfig(environment=environment, iterations=iterations, seed=seed)
        evaluator = make_evaluator(make_terrain(environment))

        def execute():
            try:
                def on_iteration(it, rec, changed):
                    handle.events.append(
                        {
                            "iteration": it,
                            "stats": {
                                "coverage": rec.coverage,
                                "mean_fitness": rec.mean_fitness,
                                "best_fitness": rec.best_fitness,
                                "qd_score": rec.qd_score,
                                "elite_mean": rec.elite_mean,
                            },
                            "changed_cells": [
                                {
                                    "row": row,
                                    "col": col,
                                    "fitness": ind.fitness,
                                    "provenance": ind.provenance,
                                }
                                for row, col, ind in changed
                            ],
                        }
                    )

                evolution.run(cfg, seeds, evaluator, on_iteration=on_iteration)
                handle.status = "done"
            except Exception as exc:  # surfaced through GET /runs/{id}
                handle.status = "error"
                handle.error = str(exc)

        handle.thread = threading.Thread(target=execute, daemon=True)
        handle.thread.start()
        return {"run_id": run_id, "status": handle.status}

    def get_run(self, run_id: str) -> RunHandle:
        try:
            return self._runs[run_id]
        except KeyError:
            raise ServiceError("unknown", f"no run {run_id}", 404) from None

    def run_stats(self, run_id: str) -> dict:
        handle = self.get_run(run_id)
        latest = handle.events[-1] if handle.events else None
        return {
            "run_id": run_id,
            "status": handle.status,
            "error": handle.error,
            "environment": handle.environment,
            "condition": handle.condition,
            "iterations_done": latest["iteration"] if latest else None,
            "latest": latest,
        }

    def run_events(self, run_id: str, start: int = 0) -> list[dict]:
        return self.get_run(run_id).events[start:]

    def wait_run(self, run_id: str, timeout: float = 600.0) -> None:
        handle = self.get_run(run_id)
        if handle.thread:
            handle.thread.join(timeout)

    # -- misc -----------------------------------------------------------------

    def environments(self) -> dict:
        return {
            "tasks": [terrain_record(make_terrain(e)) for e in TASK_ENVIRONMENTS],
            "training": terrain_record(make_terrain(TRAINING_ENV)),
        }

    def _persist(self, session: Session, event: dict) -> None:
        if not self._data_dir:
            return
        path = self._data_dir / f"session_{session.session_id}.jsonl"
        with path.open("a", encoding="utf-8") as f:
            f.write(json.dumps({"ts": time.time(), **event}) + "\n")


def _validate_record(record) -> list[str]:
    if not isinstance(record, dict):
        return ["design record must be an object"]
    try:
        g = from_record(record)
    except (KeyError, TypeError, ValueError) as exc:
        return [f"malformed design record: {exc}"]
    return validate(g)


def _sim_payload(result, remaining, duplicate) -> dict:
    return {
        "fitness": result.fitness,
        "dx": result.dx,
        "dy": result.dy,
        "fell_off": result.fell_off,
        "duplicate": duplicate,
        "remaining": remaining,
        "frames": [
            {"t": row[0], "pose": list(row[1:5]), "joint_angles": list(row[5:])}
            for row in result.frames.tolist()
        ],
    }


# ---------------------------------------------------------------------------
# HTTP shim

class _Handler(BaseHTTPRequestHandler):
    service: Service = None  # injected by serve()

    def log_message(self, *args):  # quiet by default
        pass

    def _send(self, status: int, payload) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        self.wfile.write(body)

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if not length:
            return {}
        return json.loads(self.rfile.read(length).decode("utf-8"))

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        try:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            if parts == ["environments"]:
                return self._send(200, self.service.environments())
            if len(parts) == 2 and parts[0] == "pool":
                return self._send(200, self.service.export_pool(parts[1]))
            if len(parts) == 2 and parts[0] == "runs":
                return self._send(200, self.service.run_stats(parts[1]))
            if len(parts) == 3 and parts[0] == "runs" and parts[2] == "stream":
                return self._stream(parts[1])
            if len(parts) == 2 and parts[0] == "sessions":
                return self._send(200, self.service.get_session(parts[1]).view())
            return self._send(404, {"error": "unknown", "message": self.path})
        except ServiceError as exc:
            return self._send(exc.status, exc.payload())

    def do_POST(self):
        try:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            body = self._body()
            if parts == ["sessions"]:
                return self._send(200, self.service.create_session(body.get("participant_id", "anonymous")))
            if parts == ["designs", "validate"]:
                violations = _validate_record(body.get("genome", body))
                return self._send(200, {"ok": not violations, "violations": violations})
            if len(parts) == 3 and parts[0] == "sessions" and parts[2] == "simulate":
                payload = self.service.simulate_design(
                    parts[1], body.get("environment", ""), body.get("genome", {}),
                    nonce=body.get("nonce"),
                )
                return self._send(200, payload)
            if len(parts) == 3 and parts[0] == "sessions" and parts[2] == "advance":
                return self._send(200, self.service.advance(parts[1]))
            if parts == ["runs"]:
                return self._send(200, self.service.start_run(body))
            return self._send(404, {"error": "unknown", "message": self.path})
        except ServiceError as exc:
            return self._send(exc.status, exc.payload())

    def _stream(self, run_id: str) -> None:
        handle = self.service.get_run(run_id)
        self.send_response(200)
        self.send_header("Content-Type", "text/event-stream")
        self.send_header("Cache-Control", "no-cache")
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        sent = 0
        while True:
            events = handle.events[sent:]
            for event in events:
                data = json.dumps(event)
                self.wfile.write(f"data: {data}\n\n".encode("utf-8"))
            sent += len(events)
            self.wfile.flush()
            if handle.status != "running" and sent >= len(handle.events):
                self.wfile.write(
                    f'data: {{"status": "{handle.status}"}}\n\n'.encode("utf-8")
                )
                self.wfile.flush()
                return
            time.sleep(0.05)


def make_server(port: int = 0, rng_seed: int | None = None, data_dir: str | None = None):
    service = Service(rng_seed=rng_seed, data_dir=data_dir)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    return server, service


def serve(port: int, rng_seed: int | None = None, data_dir: str | None = None) -> None:
    server, _ = make_server(port=port, rng_seed=rng_seed, data_dir=data_dir)
    print(f"serving designer API on http://127.0.0.1:{server.server_address[1]}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
