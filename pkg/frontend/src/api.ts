// Typed client for the workbench wire API. Every call goes over fetch; the
// stream endpoint is consumed as server-sent-event lines.

import type { GenomeRecord } from "./genomeModel.js";

export interface SessionView {
  session_id: string;
  participant_id: string;
  environment_order: string[];
  phase: "tutorial" | "training" | "tasks" | "done";
  current_environment: string | null;
  simulate_counts: Record<string, number>;
  remaining: number | null;
  current_design: GenomeRecord | null;
}

export interface Frame {
  t: number;
  pose: [number, number, number, number];
  joint_angles: number[];
}

export interface SimResponse {
  fitness: number;
  dx: number;
  dy: number;
  fell_off: boolean;
  duplicate: boolean;
  remaining: number | null;
  frames: Frame[];
}

export interface RunStats {
  run_id: string;
  status: "running" | "done" | "error";
  error: string | null;
  environment: string;
  condition: string;
  iterations_done: number | null;
  latest: RunEvent | null;
}

export interface RunEvent {
  iteration: number;
  stats: {
    coverage: number;
    mean_fitness: number;
    best_fitness: number;
    qd_score: number;
    elite_mean: number;
  };
  changed_cells: { row: number; col: number; fitness: number; provenance: string }[];
}

export class ApiError extends Error {
  constructor(public code: string, message: string, public status: number) {
    super(message);
  }
}

async function asJson(resp: Response): Promise<any> {
  const body = await resp.json();
  if (!resp.ok) {
    throw new ApiError(body.error ?? "unknown", body.message ?? resp.statusText, resp.status);
  }
  return body;
}

export class WorkbenchApi {
  constructor(private base: string) {}

  private post(path: string, payload: unknown): Promise<any> {
    return fetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    }).then(asJson);
  }

  private get(path: string): Promise<any> {
    return fetch(this.base + path).then(asJson);
  }

  environments(): Promise<{ tasks: { kind: string }[]; training: { kind: string } }> {
    return this.get("/environments");
  }

  createSession(participantId: string): Promise<SessionView> {
    return this.post("/sessions", { participant_id: participantId });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.get(`/sessions/${sessionId}`);
  }

  advance(sessionId: string): Promise<SessionView> {
    return this.post(`/sessions/${sessionId}/advance`, {});
  }

  validate(genome: GenomeRecord): Promise<{ ok: boolean; violations: string[] }> {
    return this.post("/designs/validate", { genome });
  }

  simulate(
    sessionId: string,
    environment: string,
    genome: GenomeRecord,
    nonce?: string,
  ): Promise<SimResponse> {
    return this.post(`/sessions/${sessionId}/simulate`, { environment, genome, nonce });
  }

  exportPool(environment: string): Promise<GenomeRecord[]> {
    return this.get(`/pool/${environment}`);
  }

  startRun(params: {
    environment: string;
    condition: string;
    iterations: number;
    seed: number;
  }): Promise<{ run_id: string }> {
    return this.post("/runs", params);
  }

  runStats(runId: string): Promise<RunStats> {
    return this.get(`/runs/${runId}`);
  }

  // Reads the whole SSE stream; onEvent fires per run event in order.
  async streamRun(runId: string, onEvent: (e: RunEvent) => void): Promise<void> {
    const resp = await fetch(`${this.base}/runs/${runId}/stream`);
    if (!resp.ok || !resp.body) throw new ApiError("stream", `stream failed: ${resp.status}`, resp.status);
    const reader = resp.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { done, value } = await reader.read();
      if (value) buffer += decoder.decode(value, { stream: true });
      let idx;
      while ((idx = buffer.indexOf("\n\n")) >= 0) {
        const chunk = buffer.slice(0, idx);
        buffer = buffer.slice(idx + 2);
        if (chunk.startsWith("data: ")) {
          const event = JSON.parse(chunk.slice(6));
          if ("iteration" in event) onEvent(event as RunEvent);
        }
      }
      if (done) return;
    }
  }
}
