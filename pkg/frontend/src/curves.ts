// Append-only stat curves for a live run: coverage, mean/best fitness, and
// QD-score drawn as SVG polylines that rescale as data arrives.

import type { RunEvent } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const SERIES: { key: keyof RunEvent["stats"]; color: string; label: string }[] = [
  { key: "coverage", color: "#2a9d8f", label: "coverage" },
  { key: "mean_fitness", color: "#4a6fa5", label: "mean fitness" },
  { key: "best_fitness", color: "#d4342c", label: "best fitness" },
  { key: "qd_score", color: "#b58a2a", label: "QD-score" },
];

const W = 360;
const H = 120;

export class RunCurves {
  private charts = new Map<string, { line: SVGPolylineElement; readout: HTMLOutputElement }>();
  private data = new Map<string, { x: number; y: number }[]>();

  constructor(private container: HTMLElement) {
    container.classList.add("run-curves");
    for (const series of SERIES) {
      const figure = document.createElement("figure");
      const svg = document.createElementNS(SVG_NS, "svg");
      svg.setAttribute("width", String(W));
      svg.setAttribute("height", String(H));
      const line = document.createElementNS(SVG_NS, "polyline");
      line.setAttribute("fill", "none");
      line.setAttribute("stroke", series.color);
      line.setAttribute("stroke-width", "1.5");
      svg.appendChild(line);
      const caption = document.createElement("figcaption");
      const label = document.createElement("span");
      label.textContent = series.label;
      const readout = document.createElement("output");
      readout.className = `readout-${series.key}`;
      caption.append(label, readout);
      figure.append(svg, caption);
      container.appendChild(figure);
      this.charts.set(series.key, { line, readout });
      this.data.set(series.key, []);
    }
  }

  append(event: RunEvent): void {
    for (const series of SERIES) {
      const points = this.data.get(series.key)!;
      points.push({ x: event.iteration, y: event.stats[series.key] });
      this.redraw(series.key);
    }
  }

  finalValues(): Record<string, number | null> {
    const out: Record<string, number | null> = {};
    for (const series of SERIES) {
      const points = this.data.get(series.key)!;
      out[series.key] = points.length ? points[points.length - 1].y : null;
    }
    return out;
  }

  pointCount(): number {
    return this.data.get("coverage")!.length;
  }

  private redraw(key: string): void {
    const { line, readout } = this.charts.get(key)!;
    const points = this.data.get(key)!;
    if (!points.length) return;
    const xMax = Math.max(points[points.length - 1].x, 1);
    let yMin = Infinity;
    let yMax = -Infinity;
    for (const p of points) {
      yMin = Math.min(yMin, p.y);
      yMax = Math.max(yMax, p.y);
    }
    if (yMax === yMin) yMax = yMin + 1;
    const path = points
      .map((p) => {
        const x = (p.x / xMax) * (W - 10) + 5;
        const y = H - 5 - ((p.y - yMin) / (yMax - yMin)) * (H - 10);
        return `${x.toFixed(1)},${y.toFixed(1)}`;
      })
      .join(" ");
    line.setAttribute("points", path);
    const last = points[points.length - 1].y;
    readout.value = Math.abs(last) >= 100 ? last.toFixed(1) : last.toFixed(4);
  }
}
