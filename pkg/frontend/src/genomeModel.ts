// Client-side mirror of the robot design space: part catalogs, allele
// ranges, validation, and the neutral starting design. The server stays the
// authority for simulation; these tables only drive instant previews and
// inline validation.

export interface LinkGene {
  shape_id: number;
  length_scale: number;
}

export interface GenomeRecord {
  body_shape_id: number;
  body_scale: [number, number, number];
  num_legs: number;
  layout_mirror: boolean;
  legs: LinkGene[][];
}

// Part dimensions in cm, indexed by shape id (1-based).
export const BODY_SHAPES: Record<number, [number, number, number]> = {
  1: [10, 10, 4],
  2: [15, 10, 4],
  3: [20, 10, 4],
  4: [10, 5, 4],
  5: [15, 5, 4],
  6: [7, 5, 4],
};

export const LINK_SHAPES: Record<number, [number, number, number]> = {
  1: [1, 1, 4],
  2: [4, 1, 4],
  3: [1, 4, 4],
  4: [1, 4, 2],
  5: [1, 4, 7],
  6: [1, 1, 7],
  7: [1, 1, 10],
};

export const SCALE_MIN = 0.5;
export const SCALE_MAX = 1.5;
export const MIN_LEGS = 2;
export const MAX_LEGS = 6;

export function neutralGenome(): GenomeRecord {
  const leg = (): LinkGene[] => [
    { shape_id: 4, length_scale: 1.0 },
    { shape_id: 4, length_scale: 1.0 },
  ];
  return {
    body_shape_id: 3,
    body_scale: [1.0, 1.0, 1.0],
    num_legs: 4,
    layout_mirror: false,
    legs: [leg(), leg(), leg(), leg()],
  };
}

export function cloneGenome(g: GenomeRecord): GenomeRecord {
  return JSON.parse(JSON.stringify(g));
}

// Pool records carry metadata (user_id, iteration, ...) next to the genome
// fields; this keeps just the genome.
export function pickGenome(record: GenomeRecord & Record<string, unknown>): GenomeRecord {
  return cloneGenome({
    body_shape_id: record.body_shape_id,
    body_scale: record.body_scale,
    num_legs: record.num_legs,
    layout_mirror: record.layout_mirror,
    legs: record.legs,
  });
}

export function validateGenome(g: GenomeRecord): string[] {
  const out: string[] = [];
  if (!(g.body_shape_id in BODY_SHAPES)) out.push(`body shape ${g.body_shape_id} out of 1-6`);
  g.body_scale.forEach((s, i) => {
    if (s < SCALE_MIN || s > SCALE_MAX) out.push(`body scale ${"xyz"[i]} out of [0.5, 1.5]`);
  });
  if (g.num_legs < MIN_LEGS || g.num_legs > MAX_LEGS) out.push(`leg count ${g.num_legs} out of 2-6`);
  if (g.legs.length !== g.num_legs) out.push(`legs list has ${g.legs.length} entries for ${g.num_legs} legs`);
  g.legs.forEach((leg, i) => {
    if (leg.length < 2 || leg.length > 3) out.push(`leg ${i + 1}: link count out of 2-3`);
    leg.forEach((link, j) => {
      if (!(link.shape_id in LINK_SHAPES)) out.push(`leg ${i + 1} link ${j + 1}: shape out of 1-7`);
      if (link.length_scale < SCALE_MIN || link.length_scale > SCALE_MAX)
        out.push(`leg ${i + 1} link ${j + 1}: length scale out of [0.5, 1.5]`);
    });
  });
  return out;
}

export function legLength(leg: LinkGene[]): number {
  return leg.reduce((acc, link) => acc + LINK_SHAPES[link.shape_id][2] * link.length_scale, 0);
}

// Sides mirror the backend convention: the first floor(n/2) legs sit on the
// left (one more there when layout_mirror is set on an odd count).
export function leftCount(numLegs: number, layoutMirror: boolean): number {
  return layoutMirror ? Math.ceil(numLegs / 2) : Math.floor(numLegs / 2);
}

export interface PreviewLeg {
  side: "left" | "right";
  attachX: number; // cm, body frame, +x forward
  attachY: number;
  length: number;
  links: { width: number; length: number }[];
}

export interface PreviewModel {
  body: { x: number; y: number; z: number };
  legs: PreviewLeg[];
  frontLeftIndex: number; // index into legs, highlighted in the preview
}

// Geometry for the 2.5D preview, recomputed client-side from the catalogs.
export function previewModel(g: GenomeRecord): PreviewModel {
  const [bx0, by0, bz0] = BODY_SHAPES[g.body_shape_id];
  const body = { x: bx0 * g.body_scale[0], y: by0 * g.body_scale[1], z: bz0 * g.body_scale[2] };
  const nl = leftCount(g.num_legs, g.layout_mirror);
  const counts = { left: nl, right: g.num_legs - nl };
  const seen = { left: 0, right: 0 };
  const legs: PreviewLeg[] = g.legs.map((leg, idx) => {
    const side = idx < nl ? "left" : "right";
    const i = seen[side]++;
    const attachX = body.x / 2 - ((i + 0.5) / counts[side]) * body.x;
    return {
      side,
      attachX,
      attachY: side === "left" ? body.y / 2 : -body.y / 2,
      length: legLength(leg),
      links: leg.map((link) => ({
        width: LINK_SHAPES[link.shape_id][0],
        length: LINK_SHAPES[link.shape_id][2] * link.length_scale,
      })),
    };
  });
  let frontLeftIndex = 0;
  let bestX = -Infinity;
  legs.forEach((leg, i) => {
    if (leg.side === "left" && leg.attachX > bestX) {
      bestX = leg.attachX;
      frontLeftIndex = i;
    }
  });
  return { body, legs, frontLeftIndex };
}
