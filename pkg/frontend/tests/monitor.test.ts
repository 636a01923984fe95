// Monitor integration: stream a finished 50-iteration run and check the
// curves' final values against the CSV log row 50 from an identical CLI run
// (exact equality, both sides are the same deterministic search), and pin
// the heatmap DOM for the same archive as a golden snapshot.

import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { WorkbenchApi } from "../src/api.js";
import { MonitorApp } from "../src/app.js";
import { ArchiveHeatmap, ArchiveCell } from "../src/heatmap.js";
import { Backend, runCli, startBackend, stopBackend } from "./helpers.js";

const ITERATIONS = 50;
const SEED = 7;

let backend: Backend;
let api: WorkbenchApi;
let outDir: string;
let logRows: Record<string, number>[];
let archiveCells: ArchiveCell[];

function parseCsv(text: string): Record<string, string>[] {
  const [header, ...lines] = text.trim().split("\n");
  const cols = header.split(",");
  return lines.map((line) => {
    // archive rows embed a quoted JSON genome; split on the first 4 commas only
    const parts: string[] = [];
    let rest = line;
    for (let i = 0; i < cols.length - 1; i++) {
      const idx = rest.indexOf(",");
      parts.push(rest.slice(0, idx));
      rest = rest.slice(idx + 1);
    }
    parts.push(rest);
    return Object.fromEntries(cols.map((c, i) => [c, parts[i]]));
  });
}

beforeAll(async () => {
  outDir = mkdtempSync(join(tmpdir(), "legwork-monitor-"));
  runCli([
    "run",
    "--env", "ground",
    "--condition", "h0",
    "--iterations", String(ITERATIONS),
    "--rng-seed", String(SEED),
    "--out", outDir,
  ]);
  const runDir = join(outDir, "ground", "h0", "run0");
  logRows = parseCsv(readFileSync(join(runDir, "log.csv"), "utf-8")).map((row) =>
    Object.fromEntries(Object.entries(row).map(([k, v]) => [k, Number(v)])),
  );
  archiveCells = parseCsv(readFileSync(join(runDir, "archive.csv"), "utf-8")).map((row) => ({
    row: Number(row.row),
    col: Number(row.col),
    fitness: Number(row.fitness),
  }));
  backend = await startBackend(7);
  api = new WorkbenchApi(backend.base);
});

afterAll(() => {
  stopBackend(backend);
  rmSync(outDir, { recursive: true, force: true });
});

describe("run monitor", () => {
  it("streamed curves end exactly at the log row 50 values", async () => {
    const { run_id } = await api.startRun({
      environment: "ground",
      condition: "h0",
      iterations: ITERATIONS,
      seed: SEED,
    });
    // wait until the background search finishes
    for (;;) {
      const stats = await api.runStats(run_id);
      if (stats.status !== "running") {
        expect(stats.status).toBe("done");
        break;
      }
      await new Promise((r) => setTimeout(r, 250));
    }

    const root = document.createElement("div");
    document.body.appendChild(root);
    const monitor = new MonitorApp(root, api);
    await monitor.watch(run_id);

    expect(monitor.curves.pointCount()).toBe(ITERATIONS + 1);
    const final = monitor.curves.finalValues();
    const row50 = logRows[logRows.length - 1];
    expect(row50.iter).toBe(ITERATIONS);
    expect(final.coverage).toBe(row50.coverage);
    expect(final.mean_fitness).toBe(row50.mean_fitness);
    expect(final.best_fitness).toBe(row50.best_fitness);
    expect(final.qd_score).toBe(row50.qd_score);

    // folding the streamed deltas reproduces the persisted archive exactly
    const streamed = root.querySelector(".archive-heatmap") as HTMLElement;
    const reference = document.createElement("div");
    document.body.appendChild(reference);
    const referenceMap = new ArchiveHeatmap(reference);
    referenceMap.render(archiveCells);
    expect(streamed.innerHTML).toBe(reference.innerHTML);
  });

  it("heatmap DOM for the pinned archive matches the golden snapshot", () => {
    const host = document.createElement("div");
    document.body.appendChild(host);
    const map = new ArchiveHeatmap(host);
    map.render(archiveCells);
    expect(map.snapshotHtml()).toMatchSnapshot();
  });
});
