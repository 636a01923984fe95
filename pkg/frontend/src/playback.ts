// Trajectory playback: frames arrive subsampled at 0.05 s, so 1x speed is
// 20 fps. The widget shows a scrubbable timeline, the walking robot from
// above, and the final score; a badge appears when the run fell off the map.

import type { Frame, SimResponse } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";
export const FRAME_SECONDS = 0.05;

export class Playback {
  private svg: SVGSVGElement;
  private marker: SVGGElement;
  private trail: SVGPolylineElement;
  private scrubber: HTMLInputElement;
  private clock: HTMLElement;
  private score: HTMLElement;
  private badge: HTMLElement;
  private frames: Frame[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;
  private index = 0;

  constructor(private container: HTMLElement) {
    container.classList.add("playback");
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("width", "460");
    this.svg.setAttribute("height", "160");
    this.svg.setAttribute("viewBox", "-30 -65 360 130");
    this.trail = document.createElementNS(SVG_NS, "polyline");
    this.trail.setAttribute("fill", "none");
    this.trail.setAttribute("stroke", "#8a96a8");
    this.marker = document.createElementNS(SVG_NS, "g");
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("r", "4");
    dot.setAttribute("fill", "#d4342c");
    this.marker.appendChild(dot);
    this.svg.append(this.trail, this.marker);
    container.appendChild(this.svg);

    const controls = document.createElement("div");
    controls.className = "playback-controls";
    const play = document.createElement("button");
    play.id = "play-button";
    play.textContent = "play";
    play.addEventListener("click", () => this.play());
    this.scrubber = document.createElement("input");
    this.scrubber.type = "range";
    this.scrubber.id = "scrubber";
    this.scrubber.min = "0";
    this.scrubber.value = "0";
    this.scrubber.addEventListener("input", () => {
      this.pause();
      this.showFrame(Number(this.scrubber.value));
    });
    this.clock = document.createElement("span");
    this.clock.className = "clock";
    controls.append(play, this.scrubber, this.clock);
    container.appendChild(controls);

    this.score = document.createElement("div");
    this.score.className = "score";
    this.badge = document.createElement("div");
    this.badge.className = "fell-badge";
    this.badge.hidden = true;
    this.badge.textContent = "fell off edge";
    container.append(this.score, this.badge);
  }

  load(result: SimResponse): void {
    this.pause();
    this.frames = result.frames;
    this.scrubber.max = String(Math.max(this.frames.length - 1, 0));
    this.score.textContent =
      `fitness ${result.fitness.toFixed(2)}  ` +
      `(dx ${result.dx.toFixed(2)} cm, dy ${result.dy.toFixed(2)} cm)`;
    this.badge.hidden = !result.fell_off;
    this.trail.setAttribute(
      "points",
      this.frames.map((f) => `${f.pose[0].toFixed(2)},${(-f.pose[1]).toFixed(2)}`).join(" "),
    );
    this.showFrame(0);
  }

  play(): void {
    if (!this.frames.length) return;
    this.pause();
    this.timer = setInterval(() => {
      if (this.index + 1 >= this.frames.length) {
        this.pause();
        return;
      }
      this.showFrame(this.index + 1);
    }, FRAME_SECONDS * 1000);
  }

  pause(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  frameCount(): number {
    return this.frames.length;
  }

  currentIndex(): number {
    return this.index;
  }

  showFrame(index: number): void {
    if (!this.frames.length) return;
    this.index = Math.min(Math.max(index, 0), this.frames.length - 1);
    const f = this.frames[this.index];
    this.marker.setAttribute(
      "transform",
      `translate(${f.pose[0].toFixed(2)}, ${(-f.pose[1]).toFixed(2)}) ` +
        `rotate(${((-f.pose[3] * 180) / Math.PI).toFixed(1)})`,
    );
    this.scrubber.value = String(this.index);
    this.clock.textContent = `${f.t.toFixed(2)} s`;
  }
}
