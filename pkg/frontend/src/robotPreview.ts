// 2.5D orthographic preview: top view (x right, y up-screen = robot left)
// and side view (x right, z up), drawn as SVG from the client-side catalogs.
// The front-left leg is always highlighted red so handedness stays readable.

import { GenomeRecord, previewModel } from "./genomeModel.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const SCALE = 4; // px per cm
const FRONT_LEFT_COLOR = "#d4342c";
const BODY_COLOR = "#8a96a8";
const LEG_COLOR = "#4a5668";

function rect(x: number, y: number, w: number, h: number, fill: string, rx = 1): SVGRectElement {
  const el = document.createElementNS(SVG_NS, "rect");
  el.setAttribute("x", x.toFixed(1));
  el.setAttribute("y", y.toFixed(1));
  el.setAttribute("width", Math.max(w, 1).toFixed(1));
  el.setAttribute("height", Math.max(h, 1).toFixed(1));
  el.setAttribute("rx", String(rx));
  el.setAttribute("fill", fill);
  return el;
}

export class RobotPreview {
  private top: SVGSVGElement;
  private side: SVGSVGElement;

  constructor(private container: HTMLElement) {
    container.classList.add("robot-preview");
    this.top = document.createElementNS(SVG_NS, "svg");
    this.side = document.createElementNS(SVG_NS, "svg");
    for (const [svg, label] of [
      [this.top, "top view"],
      [this.side, "side view"],
    ] as const) {
      const wrap = document.createElement("figure");
      const caption = document.createElement("figcaption");
      caption.textContent = label;
      svg.setAttribute("width", "320");
      svg.setAttribute("height", "220");
      wrap.appendChild(svg);
      wrap.appendChild(caption);
      container.appendChild(wrap);
    }
  }

  render(genome: GenomeRecord): void {
    const model = previewModel(genome);
    this.top.replaceChildren();
    this.side.replaceChildren();

    // top view: centered body, legs drawn outward from their side
    const cx = 160;
    const cy = 110;
    const bw = model.body.x * SCALE;
    const bh = model.body.y * SCALE;
    this.top.appendChild(rect(cx - bw / 2, cy - bh / 2, bw, bh, BODY_COLOR, 3));
    model.legs.forEach((leg, i) => {
      const color = i === model.frontLeftIndex ? FRONT_LEFT_COLOR : LEG_COLOR;
      const x = cx + leg.attachX * SCALE;
      const outward = leg.side === "left" ? -1 : 1; // screen-y: left side drawn up
      let y = cy + outward * (bh / 2);
      for (const link of leg.links) {
        const len = link.length * SCALE * 0.5; // foreshortened: legs point down
        const w = Math.max(link.width * SCALE, 2);
        this.top.appendChild(
          rect(x - w / 2, outward > 0 ? y : y - len, w, len, color),
        );
        y += outward * len;
      }
    });

    // side view: body at a height so the longest leg touches the floor line
    const floor = 200;
    const maxLen = Math.max(...model.legs.map((l) => l.length), 1);
    const bodyTop = floor - (maxLen + model.body.z) * SCALE;
    this.side.appendChild(
      rect(cx - bw / 2, bodyTop, bw, model.body.z * SCALE, BODY_COLOR, 3),
    );
    const bodyBottom = bodyTop + model.body.z * SCALE;
    model.legs.forEach((leg, i) => {
      const color = i === model.frontLeftIndex ? FRONT_LEFT_COLOR : LEG_COLOR;
      const x = cx + leg.attachX * SCALE;
      let y = bodyBottom - (model.body.z * SCALE) / 2;
      for (const link of leg.links) {
        const len = link.length * SCALE;
        const w = Math.max(link.width * SCALE, 2);
        this.side.appendChild(rect(x - w / 2, y, w, len, color));
        y += len;
      }
    });
    const floorLine = document.createElementNS(SVG_NS, "line");
    floorLine.setAttribute("x1", "10");
    floorLine.setAttribute("x2", "310");
    floorLine.setAttribute("y1", String(floor));
    floorLine.setAttribute("y2", String(floor));
    floorLine.setAttribute("stroke", "#b0a68f");
    this.side.appendChild(floorLine);
  }
}
