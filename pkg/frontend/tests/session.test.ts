// Scripted designer session against the real backend: tutorial -> training
// -> three task environments, quota enforcement on the 11th update, neutral
// resets between environments, and pool export counts.

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, WorkbenchApi } from "../src/api.js";
import { DesignerApp } from "../src/app.js";
import { cloneGenome, neutralGenome, GenomeRecord } from "../src/genomeModel.js";
import { Backend, startBackend, stopBackend } from "./helpers.js";

let backend: Backend;
let api: WorkbenchApi;

beforeAll(async () => {
  backend = await startBackend(7);
  api = new WorkbenchApi(backend.base);
});

afterAll(() => {
  stopBackend(backend);
});

function distinctDesign(k: number): GenomeRecord {
  const g = neutralGenome();
  g.body_scale[0] = 0.5 + (k % 90) * 0.01;
  g.legs[0][0].length_scale = 0.6 + (k % 80) * 0.01;
  return g;
}

describe("full study session", () => {
  it("walks the whole flow with quota, resets, and pool export", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new DesignerApp(root, api);
    await app.start("scripted");

    const banner = root.querySelector(".phase-banner") as HTMLElement;
    const simulateButton = root.querySelector("#simulate-button") as HTMLButtonElement;
    expect(banner.dataset.phase).toBe("tutorial");
    expect(simulateButton.disabled).toBe(true);

    // tutorial -> training: unlimited, uncounted simulations
    await app.advance();
    expect(banner.dataset.phase).toBe("training");
    expect(app.currentEnvironment()).toBe("training");
    const trainingResult = await app.simulate();
    expect(trainingResult).not.toBeNull();
    expect(trainingResult!.remaining).toBeNull();
    expect(trainingResult!.frames.length).toBe(601);

    // training -> three tasks in the server's randomized order
    await app.advance();
    const order = (await api.getSession(app.session())).environment_order;
    expect([...order].sort()).toEqual(["ground", "sine", "valley"]);

    const plannedSimulations = [10, 3, 2];
    for (let envIdx = 0; envIdx < 3; envIdx++) {
      expect(banner.dataset.phase).toBe("tasks");
      expect(app.currentEnvironment()).toBe(order[envIdx]);
      // controls reset to the neutral design at each environment start
      expect(app.panel.current()).toEqual(neutralGenome());

      for (let k = 0; k < plannedSimulations[envIdx]; k++) {
        app.panel.setGenome(distinctDesign(envIdx * 20 + k));
        const result = await app.simulate();
        expect(result).not.toBeNull();
        expect(result!.remaining).toBe(10 - k - 1);
        app.playback.pause();
      }

      if (envIdx === 0) {
        // all ten updates used: the UI blocks the 11th...
        expect(simulateButton.disabled).toBe(true);
        const counter = root.querySelector(".update-counter") as HTMLElement;
        expect(counter.textContent).toBe("10 of 10 updates used");
        const blocked = await app.simulate();
        expect(blocked).toBeNull();
        // ...and the server rejects a direct 11th submission
        await expect(
          api.simulate(app.session(), order[0], distinctDesign(99)),
        ).rejects.toMatchObject({ code: "quota" });
        // a recorded design can be loaded back into the panel
        expect(await app.loadFromPool()).toBe(true);
        expect(app.panel.current()).toEqual(distinctDesign(9));
      }
      await app.advance();
    }

    expect(banner.dataset.phase).toBe("done");
    expect(simulateButton.disabled).toBe(true);

    // pool export: one record per simulation plus the neutral baseline
    for (let envIdx = 0; envIdx < 3; envIdx++) {
      const pool = await api.exportPool(order[envIdx]);
      expect(pool.length).toBe(plannedSimulations[envIdx] + 1);
      const withMeta = pool as (GenomeRecord & { user_id: string; iteration: number })[];
      expect(withMeta[0].iteration).toBe(0);
      expect(withMeta.every((r) => r.user_id === "scripted")).toBe(true);
    }
  });

  it("server-randomized order differs across differently seeded services", async () => {
    const other = await startBackend(1234);
    try {
      const a = await api.createSession("order-check");
      const b = await new WorkbenchApi(other.base).createSession("order-check");
      expect([...a.environment_order].sort()).toEqual([...b.environment_order].sort());
      // orders come from the server; the UI never invents one
      expect(a.environment_order.length).toBe(3);
    } finally {
      stopBackend(other);
    }
  });

  it("rejects an out-of-range design client-side and server-side", async () => {
    const bad = cloneGenome(neutralGenome());
    bad.body_shape_id = 12;
    const verdict = await api.validate(bad);
    expect(verdict.ok).toBe(false);
    expect(verdict.violations.length).toBeGreaterThan(0);
  });
});
