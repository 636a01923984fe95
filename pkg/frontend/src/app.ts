// Designer application: wires the parameter panel, preview, session flow,
// playback, and the run monitor to the wire API. The server owns all state;
// the page can be refreshed and resumed from the session id.

import { ApiError, RunEvent, SimResponse, WorkbenchApi } from "./api.js";
import { DesignerPanel } from "./designerPanel.js";
import { ArchiveCell, ArchiveHeatmap } from "./heatmap.js";
import { RunCurves } from "./curves.js";
import { GenomeRecord, pickGenome, validateGenome } from "./genomeModel.js";
import { Playback } from "./playback.js";
import { RobotPreview } from "./robotPreview.js";

export class DesignerApp {
  readonly panel: DesignerPanel;
  readonly preview: RobotPreview;
  readonly playback: Playback;
  private phaseBanner: HTMLElement;
  private envLabel: HTMLElement;
  private counter: HTMLElement;
  private messages: HTMLElement;
  private simulateButton: HTMLButtonElement;
  private advanceButton: HTMLButtonElement;
  private loadButton: HTMLButtonElement;
  private sessionId: string | null = null;
  private busy = false;

  constructor(
    private root: HTMLElement,
    private api: WorkbenchApi,
  ) {
    root.classList.add("designer-app");

    const status = document.createElement("header");
    this.phaseBanner = document.createElement("div");
    this.phaseBanner.className = "phase-banner";
    this.envLabel = document.createElement("div");
    this.envLabel.className = "env-label";
    this.counter = document.createElement("div");
    this.counter.className = "update-counter";
    status.append(this.phaseBanner, this.envLabel, this.counter);
    root.appendChild(status);

    const columns = document.createElement("div");
    columns.className = "columns";
    const left = document.createElement("section");
    const center = document.createElement("section");
    const right = document.createElement("section");
    columns.append(left, center, right);
    root.appendChild(columns);

    this.preview = new RobotPreview(center);
    this.panel = new DesignerPanel(right, (g) => this.designChanged(g));

    this.simulateButton = document.createElement("button");
    this.simulateButton.id = "simulate-button";
    this.simulateButton.textContent = "simulate";
    this.simulateButton.addEventListener("click", () => void this.simulate());
    this.advanceButton = document.createElement("button");
    this.advanceButton.id = "advance-button";
    this.advanceButton.textContent = "continue";
    this.advanceButton.addEventListener("click", () => void this.advance());
    this.loadButton = document.createElement("button");
    this.loadButton.id = "load-design-button";
    this.loadButton.textContent = "load a recorded design";
    this.loadButton.addEventListener("click", () => void this.loadFromPool());
    this.messages = document.createElement("div");
    this.messages.className = "messages";
    left.append(this.simulateButton, this.advanceButton, this.loadButton, this.messages);
    this.playback = new Playback(left);

    this.preview.render(this.panel.current());
  }

  async start(participantId: string): Promise<void> {
    const view = await this.api.createSession(participantId);
    this.sessionId = view.session_id;
    this.applyView(view);
  }

  async resume(sessionId: string): Promise<void> {
    const view = await this.api.getSession(sessionId);
    this.sessionId = sessionId;
    this.applyView(view);
  }

  session(): string {
    if (!this.sessionId) throw new Error("no session");
    return this.sessionId;
  }

  currentEnvironment(): string | null {
    return this.envLabel.dataset.env ?? null;
  }

  private applyView(view: {
    phase: string;
    current_environment: string | null;
    remaining: number | null;
    current_design: GenomeRecord | null;
  }): void {
    this.phaseBanner.textContent = `phase: ${view.phase}`;
    this.phaseBanner.dataset.phase = view.phase;
    this.envLabel.textContent = view.current_environment
      ? `environment: ${view.current_environment}`
      : "";
    if (view.current_environment) this.envLabel.dataset.env = view.current_environment;
    else delete this.envLabel.dataset.env;
    this.updateCounter(view.remaining);
    if (view.current_design) this.panel.setGenome(view.current_design);
    this.simulateButton.disabled =
      view.phase === "tutorial" || view.phase === "done" || view.remaining === 0;
    this.advanceButton.disabled = view.phase === "done";
  }

  private updateCounter(remaining: number | null): void {
    if (remaining === null) {
      this.counter.textContent = "";
      return;
    }
    const used = 10 - remaining;
    this.counter.textContent = `${used} of 10 updates used`;
    if (remaining === 0) this.simulateButton.disabled = true;
  }

  private designChanged(g: GenomeRecord): void {
    this.preview.render(g);
    const violations = validateGenome(g);
    this.messages.textContent = violations.join("; ");
    this.messages.classList.toggle("has-errors", violations.length > 0);
  }

  async simulate(): Promise<SimResponse | null> {
    if (this.busy || this.simulateButton.disabled) return null;
    const genome = this.panel.current();
    const violations = validateGenome(genome);
    if (violations.length) {
      this.messages.textContent = violations.join("; ");
      return null;
    }
    const check = await this.api.validate(genome);
    if (!check.ok) {
      this.messages.textContent = check.violations.join("; ");
      return null;
    }
    this.busy = true;
    this.simulateButton.disabled = true;
    try {
      const env = this.currentEnvironment();
      if (!env) throw new ApiError("sequence", "no active environment", 400);
      const nonce = `${this.sessionId}-${Date.now()}-${Math.random().toString(36).slice(2)}`;
      const result = await this.api.simulate(this.session(), env, genome, nonce);
      this.playback.load(result);
      this.playback.play();
      this.updateCounter(result.remaining);
      this.messages.textContent = result.duplicate ? "unchanged design (recorded as duplicate)" : "";
      this.simulateButton.disabled = result.remaining === 0;
      return result;
    } catch (err) {
      if (err instanceof ApiError) {
        this.messages.textContent = `${err.code}: ${err.message}`;
        if (err.code === "quota") this.simulateButton.disabled = true;
        return null;
      }
      throw err;
    } finally {
      this.busy = false;
      if (this.messages.classList.contains("has-errors")) this.simulateButton.disabled = false;
    }
  }

  async advance(): Promise<void> {
    const view = await this.api.advance(this.session());
    this.applyView(view);
  }

  // Loads the latest recorded design for the current environment back into
  // the panel (the pool holds everything recorded so far, newest last).
  async loadFromPool(): Promise<boolean> {
    const env = this.currentEnvironment();
    if (!env || env === "training") {
      this.messages.textContent = "no recorded designs for this phase";
      return false;
    }
    const pool = await this.api.exportPool(env);
    if (!pool.length) {
      this.messages.textContent = "the pool is empty";
      return false;
    }
    this.panel.setGenome(pickGenome(pool[pool.length - 1] as GenomeRecord & Record<string, unknown>));
    this.messages.textContent = "";
    return true;
  }
}

export class MonitorApp {
  readonly heatmap: ArchiveHeatmap;
  readonly curves: RunCurves;
  private known = new Map<string, ArchiveCell>();
  private status: HTMLElement;

  constructor(
    root: HTMLElement,
    private api: WorkbenchApi,
  ) {
    root.classList.add("monitor-app");
    this.status = document.createElement("div");
    this.status.className = "run-status";
    root.appendChild(this.status);
    const split = document.createElement("div");
    split.className = "columns";
    const mapHost = document.createElement("section");
    const curveHost = document.createElement("section");
    split.append(mapHost, curveHost);
    root.appendChild(split);
    this.heatmap = new ArchiveHeatmap(mapHost);
    this.curves = new RunCurves(curveHost);
  }

  async watch(runId: string): Promise<void> {
    this.status.textContent = `run ${runId}: streaming`;
    await this.api.streamRun(runId, (event) => this.consume(event));
    const stats = await this.api.runStats(runId);
    this.status.textContent = `run ${runId}: ${stats.status}`;
  }

  consume(event: RunEvent): void {
    this.curves.append(event);
    this.heatmap.applyDeltas(event.changed_cells, this.known);
  }
}

export function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const api = new WorkbenchApi(params.get("api") ?? "http://127.0.0.1:8151");
  const designerHost = document.getElementById("designer");
  const monitorHost = document.getElementById("monitor");
  if (designerHost) {
    const app = new DesignerApp(designerHost, api);
    const existing = params.get("session");
    void (existing ? app.resume(existing) : app.start(params.get("participant") ?? "anonymous"));
  }
  if (monitorHost) {
    const monitor = new MonitorApp(monitorHost, api);
    const runId = params.get("run");
    if (runId) void monitor.watch(runId);
  }
}
