// Canvas drawing of the scene, the network, and level-set components.
// Pure with respect to a 2D-context-like interface so tests can record.

import { LevelsetResponse, ShapeJson } from "./api.js";

export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
}

const PALETTE = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

export function componentColor(comp: number | null, side: "upper" | "lower"): string {
  if (comp === null) return "#dddddd";
  const color = PALETTE[(comp - 1) % PALETTE.length];
  return side === "upper" ? color : shade(color);
}

function shade(hex: string): string {
  const n = parseInt(hex.slice(1), 16);
  const f = (v: number) => Math.max(0, Math.round(v * 0.45));
  const r = f((n >> 16) & 255), g = f((n >> 8) & 255), b = f(n & 255);
  return `#${((r << 16) | (g << 8) | b).toString(16).padStart(6, "0")}`;
}

export class WorldTransform {
  constructor(
    public domain: [number, number, number, number],
    public width: number,
    public height: number,
  ) {}

  sx(x: number): number {
    const [x0, , x1] = this.domain;
    return ((x - x0) / (x1 - x0)) * this.width;
  }

  sy(y: number): number {
    const [, y0, , y1] = this.domain;
    return this.height - ((y - y0) / (y1 - y0)) * this.height;
  }

  scale(): number {
    const [x0, , x1] = this.domain;
    return this.width / (x1 - x0);
  }

  toWorld(px: number, py: number): [number, number] {
    const [x0, y0, x1, y1] = this.domain;
    return [x0 + (px / this.width) * (x1 - x0), y0 + ((this.height - py) / this.height) * (y1 - y0)];
  }
}

export function drawShape(ctx: Ctx2D, t: WorldTransform, shape: ShapeJson): void {
  ctx.strokeStyle = "#333";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  if (shape.type === "disc") {
    ctx.arc(t.sx(shape.c[0]), t.sy(shape.c[1]), shape.r * t.scale(), 0, 2 * Math.PI);
  } else if (shape.type === "annulus") {
    ctx.arc(t.sx(shape.c[0]), t.sy(shape.c[1]), shape.r_out * t.scale(), 0, 2 * Math.PI);
    ctx.moveTo(t.sx(shape.c[0]) + shape.r_in * t.scale(), t.sy(shape.c[1]));
    ctx.arc(t.sx(shape.c[0]), t.sy(shape.c[1]), shape.r_in * t.scale(), 0, 2 * Math.PI);
  } else if (shape.type === "polygon") {
    shape.pts.forEach(([x, y], i) =>
      i === 0 ? ctx.moveTo(t.sx(x), t.sy(y)) : ctx.lineTo(t.sx(x), t.sy(y)),
    );
    ctx.closePath();
  } else {
    shape.path.forEach(([x, y], i) =>
      i === 0 ? ctx.moveTo(t.sx(x), t.sy(y)) : ctx.lineTo(t.sx(x), t.sy(y)),
    );
    ctx.lineWidth = Math.max(1.5, 2 * shape.r * t.scale());
  }
  ctx.stroke();
}

export function drawLevelset(
  ctx: Ctx2D,
  t: WorldTransform,
  data: LevelsetResponse,
  showComponents: boolean,
): void {
  ctx.globalAlpha = 0.35;
  ctx.strokeStyle = "#cccccc";
  ctx.lineWidth = 0.5;
  for (const [a, b] of data.edges) {
    const pa = data.nodes[a], pb = data.nodes[b];
    ctx.beginPath();
    ctx.moveTo(t.sx(pa.xy[0]), t.sy(pa.xy[1]));
    ctx.lineTo(t.sx(pb.xy[0]), t.sy(pb.xy[1]));
    ctx.stroke();
  }
  ctx.globalAlpha = 1;
  for (const node of data.nodes) {
    ctx.fillStyle = showComponents
      ? node.upper_comp !== null
        ? componentColor(node.upper_comp, "upper")
        : componentColor(node.lower_comp, "lower")
      : readingColor(node.reading);
    ctx.beginPath();
    ctx.arc(t.sx(node.xy[0]), t.sy(node.xy[1]), 2.4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

export function readingColor(reading: number): string {
  const ramp = ["#f0f0f0", "#9ecae1", "#4292c6", "#08519c", "#042142"];
  return ramp[Math.min(reading, ramp.length - 1)];
}

export function drawAll(
  ctx: Ctx2D,
  t: WorldTransform,
  shapes: ShapeJson[],
  levelset: LevelsetResponse | null,
  overlays: { network: boolean; components: boolean },
): void {
  ctx.clearRect(0, 0, t.width, t.height);
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, t.width, t.height);
  if (levelset && overlays.network) {
    drawLevelset(ctx, t, levelset, overlays.components);
  }
  for (const s of shapes) drawShape(ctx, t, s);
}
