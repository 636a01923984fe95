// Parameter controls mirroring the genome exactly: body shape selector,
// three scale sliders, leg count, layout toggle, and per-leg link editors.
// Controls are range-clamped so the panel can never produce an out-of-range
// genome; a change callback feeds validation and the live preview.

import {
  GenomeRecord,
  MAX_LEGS,
  MIN_LEGS,
  SCALE_MAX,
  SCALE_MIN,
  cloneGenome,
  neutralGenome,
} from "./genomeModel.js";

export class DesignerPanel {
  private genome: GenomeRecord = neutralGenome();
  private legsHost: HTMLElement;

  constructor(
    private container: HTMLElement,
    private onChange: (g: GenomeRecord) => void,
  ) {
    container.classList.add("designer-panel");

    const bodyShape = this.select("body-shape", "Body shape", [1, 2, 3, 4, 5, 6]);
    bodyShape.addEventListener("change", () => {
      this.genome.body_shape_id = Number(bodyShape.value);
      this.changed();
    });

    for (const [axis, idx] of [["x", 0], ["y", 1], ["z", 2]] as const) {
      const slider = this.slider(`body-scale-${axis}`, `Body scale ${axis}`);
      slider.addEventListener("input", () => {
        this.genome.body_scale[idx] = Number(slider.value);
        this.changed();
      });
    }

    const legCount = this.select("leg-count", "Legs", [2, 3, 4, 5, 6]);
    legCount.addEventListener("change", () => {
      this.setLegCount(Number(legCount.value));
      this.changed();
    });

    const mirrorToggle = document.createElement("input");
    mirrorToggle.type = "checkbox";
    mirrorToggle.id = "layout-mirror";
    const mirrorLabel = document.createElement("label");
    mirrorLabel.htmlFor = mirrorToggle.id;
    mirrorLabel.textContent = "Extra leg on the left (odd counts)";
    mirrorToggle.addEventListener("change", () => {
      this.genome.layout_mirror = mirrorToggle.checked;
      this.changed();
    });
    const mirrorRow = document.createElement("div");
    mirrorRow.className = "control-row";
    mirrorRow.append(mirrorToggle, mirrorLabel);
    container.appendChild(mirrorRow);

    this.legsHost = document.createElement("div");
    this.legsHost.className = "legs-host";
    container.appendChild(this.legsHost);

    this.syncControls();
  }

  current(): GenomeRecord {
    return cloneGenome(this.genome);
  }

  setGenome(g: GenomeRecord): void {
    this.genome = cloneGenome(g);
    this.syncControls();
    this.onChange(this.current());
  }

  reset(): void {
    this.setGenome(neutralGenome());
  }

  private changed(): void {
    this.onChange(this.current());
  }

  private setLegCount(n: number): void {
    const clamped = Math.min(Math.max(n, MIN_LEGS), MAX_LEGS);
    this.genome.num_legs = clamped;
    while (this.genome.legs.length < clamped) {
      const last = this.genome.legs[this.genome.legs.length - 1];
      this.genome.legs.push(JSON.parse(JSON.stringify(last)));
    }
    this.genome.legs.length = clamped;
    this.renderLegEditors();
  }

  private select(id: string, label: string, values: number[]): HTMLSelectElement {
    const row = document.createElement("div");
    row.className = "control-row";
    const lab = document.createElement("label");
    lab.htmlFor = id;
    lab.textContent = label;
    const sel = document.createElement("select");
    sel.id = id;
    for (const v of values) {
      const opt = document.createElement("option");
      opt.value = String(v);
      opt.textContent = String(v);
      sel.appendChild(opt);
    }
    row.append(lab, sel);
    this.container.appendChild(row);
    return sel;
  }

  private slider(id: string, label: string): HTMLInputElement {
    const row = document.createElement("div");
    row.className = "control-row";
    const lab = document.createElement("label");
    lab.htmlFor = id;
    lab.textContent = label;
    const input = document.createElement("input");
    input.type = "range";
    input.id = id;
    input.min = String(SCALE_MIN);
    input.max = String(SCALE_MAX);
    input.step = "0.01";
    const value = document.createElement("output");
    value.setAttribute("for", id);
    input.addEventListener("input", () => (value.value = input.value));
    row.append(lab, input, value);
    this.container.appendChild(row);
    return input;
  }

  private renderLegEditors(): void {
    this.legsHost.replaceChildren();
    this.genome.legs.forEach((leg, i) => {
      const box = document.createElement("fieldset");
      box.className = "leg-editor";
      const legend = document.createElement("legend");
      legend.textContent = `Leg ${i + 1}`;
      box.appendChild(legend);

      const linkCount = document.createElement("select");
      linkCount.className = "link-count";
      for (const v of [2, 3]) {
        const opt = document.createElement("option");
        opt.value = String(v);
        opt.textContent = `${v} links`;
        linkCount.appendChild(opt);
      }
      linkCount.value = String(leg.length);
      linkCount.addEventListener("change", () => {
        const n = Number(linkCount.value);
        if (n > leg.length) leg.push({ ...leg[leg.length - 1] });
        leg.length = n;
        this.renderLegEditors();
        this.changed();
      });
      box.appendChild(linkCount);

      leg.forEach((link, j) => {
        const row = document.createElement("div");
        row.className = "control-row link-row";
        const shape = document.createElement("select");
        shape.className = "link-shape";
        for (const v of [1, 2, 3, 4, 5, 6, 7]) {
          const opt = document.createElement("option");
          opt.value = String(v);
          opt.textContent = `shape ${v}`;
          shape.appendChild(opt);
        }
        shape.value = String(link.shape_id);
        shape.addEventListener("change", () => {
          link.shape_id = Number(shape.value);
          this.changed();
        });
        const scale = document.createElement("input");
        scale.type = "range";
        scale.className = "link-scale";
        scale.min = String(SCALE_MIN);
        scale.max = String(SCALE_MAX);
        scale.step = "0.01";
        scale.value = String(link.length_scale);
        scale.addEventListener("input", () => {
          link.length_scale = Number(scale.value);
          this.changed();
        });
        const label = document.createElement("span");
        label.textContent = `link ${j + 1}`;
        row.append(label, shape, scale);
        box.appendChild(row);
      });
      this.legsHost.appendChild(box);
    });
  }

  private syncControls(): void {
    (this.container.querySelector("#body-shape") as HTMLSelectElement).value = String(
      this.genome.body_shape_id,
    );
    for (const [axis, idx] of [["x", 0], ["y", 1], ["z", 2]] as const) {
      const el = this.container.querySelector(`#body-scale-${axis}`) as HTMLInputElement;
      el.value = String(this.genome.body_scale[idx]);
    }
    (this.container.querySelector("#leg-count") as HTMLSelectElement).value = String(
      this.genome.num_legs,
    );
    (this.container.querySelector("#layout-mirror") as HTMLInputElement).checked =
      this.genome.layout_mirror;
    this.renderLegEditors();
  }
}
