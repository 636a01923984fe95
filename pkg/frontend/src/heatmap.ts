// 20x20 archive heatmap: one div per cell, colour encodes fitness from cold
// blue through yellow, empty cells stay dark. Rendering is deterministic so
// a pinned archive yields a stable DOM snapshot.

export interface ArchiveCell {
  row: number;
  col: number;
  fitness: number;
}

export const MAP_ROWS = 20;
export const MAP_COLS = 20;

const STOPS = [
  { t: 0.0, r: 35, g: 52, b: 105 },
  { t: 0.5, r: 42, g: 157, b: 143 },
  { t: 1.0, r: 238, g: 201, b: 75 },
];

export function fitnessColor(value: number, lo: number, hi: number): string {
  const t = hi > lo ? Math.min(Math.max((value - lo) / (hi - lo), 0), 1) : 0.5;
  let lower = STOPS[0];
  let upper = STOPS[STOPS.length - 1];
  for (let i = 0; i < STOPS.length - 1; i++) {
    if (t >= STOPS[i].t && t <= STOPS[i + 1].t) {
      lower = STOPS[i];
      upper = STOPS[i + 1];
      break;
    }
  }
  const span = upper.t - lower.t;
  const f = span === 0 ? 0 : (t - lower.t) / span;
  const r = Math.round(lower.r + (upper.r - lower.r) * f);
  const g = Math.round(lower.g + (upper.g - lower.g) * f);
  const b = Math.round(lower.b + (upper.b - lower.b) * f);
  return `rgb(${r}, ${g}, ${b})`;
}

export class ArchiveHeatmap {
  private cells: HTMLElement[] = [];

  constructor(private container: HTMLElement) {
    container.classList.add("archive-heatmap");
    const grid = document.createElement("div");
    grid.className = "heatmap-grid";
    for (let r = 0; r < MAP_ROWS; r++) {
      for (let c = 0; c < MAP_COLS; c++) {
        const cell = document.createElement("div");
        cell.className = "heatmap-cell empty";
        cell.dataset.row = String(r);
        cell.dataset.col = String(c);
        grid.appendChild(cell);
        this.cells.push(cell);
      }
    }
    container.appendChild(grid);
  }

  render(cells: ArchiveCell[]): void {
    for (const el of this.cells) {
      el.className = "heatmap-cell empty";
      el.style.backgroundColor = "";
      el.title = "";
    }
    if (!cells.length) return;
    const values = cells.map((c) => c.fitness);
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    for (const cell of cells) {
      const el = this.cells[cell.row * MAP_COLS + cell.col];
      el.className = "heatmap-cell";
      el.style.backgroundColor = fitnessColor(cell.fitness, lo, hi);
      el.title = `(${cell.row}, ${cell.col}) fitness ${cell.fitness.toFixed(2)}`;
    }
  }

  // Applies a stream of per-iteration cell deltas on top of the current map.
  applyDeltas(deltas: ArchiveCell[], known: Map<string, ArchiveCell>): void {
    for (const d of deltas) {
      known.set(`${d.row},${d.col}`, d);
    }
    this.render([...known.values()]);
  }

  snapshotHtml(): string {
    return this.container.innerHTML;
  }
}
