// Explorer view-model: tools, level slider, overlays, and the session
// lifecycle. All mutations go through the API; estimates and component
// labels are whatever the service returns.

import {
  ApiClient,
  ApiError,
  EstimateResponse,
  LevelsetResponse,
  SceneJson,
  ShapeJson,
} from "./api.js";

export type Tool = "disc" | "polygon" | "annulus" | "path";

export interface Overlays {
  network: boolean;
  components: boolean;
  heatmap: boolean;
}

export interface PanelData {
  estimate: number | null;
  truth: number | null;
  smoothed: number | null;
  perLevel: { s: number; upper: number; lower: number }[];
}

const SNAP = 1 / 16; // dyadic grid so wavelet demos stay aligned

export function snapDyadic(x: number): number {
  return Math.round(x / SNAP) * SNAP;
}

export class ExplorerApp {
  sessionId: string | null = null;
  tool: Tool = "disc";
  level = 0;
  overlays: Overlays = { network: true, components: true, heatmap: false };
  shapes: ShapeJson[] = [];
  estimateData: EstimateResponse | null = null;
  levelsetData: LevelsetResponse | null = null;
  pendingPath: [number, number][] = [];
  noiseFraction = 0;
  smoothRadius: number | null = null;
  connectionLost = false;
  private inflight = new Map<string, Promise<unknown>>();

  constructor(
    private api: ApiClient,
    public domain: [number, number, number, number] = [0, 0, 12, 9],
    private opts: { nodes?: number; seed?: number; resolution?: number } = {},
  ) {}

  get maxLevel(): number {
    const levels = this.estimateData?.per_level_beta0 ?? [];
    return Math.max(0, levels.length - 1);
  }

  scene(): SceneJson {
    return { domain: this.domain, shapes: this.shapes };
  }

  async start(): Promise<void> {
    const res = await this.guard(() => this.api.createSession(this.scene(), this.opts));
    this.sessionId = res.id;
    await this.refresh();
  }

  private need(): string {
    if (!this.sessionId) throw new Error("session not started");
    return this.sessionId;
  }

  // one in-flight request per (session, endpoint); concurrent callers share it
  private dedup<T>(key: string, run: () => Promise<T>): Promise<T> {
    const existing = this.inflight.get(key);
    if (existing) return existing as Promise<T>;
    const p = run().finally(() => this.inflight.delete(key));
    this.inflight.set(key, p);
    return p;
  }

  private async guard<T>(run: () => Promise<T>): Promise<T> {
    try {
      const out = await run();
      this.connectionLost = false;
      return out;
    } catch (err) {
      if (!(err instanceof ApiError)) this.connectionLost = true;
      throw err;
    }
  }

  private async addShape(shape: ShapeJson): Promise<void> {
    const sid = this.need();
    this.shapes.push(shape); // optimistic
    try {
      const res = await this.guard(() => this.api.addShape(sid, shape));
      this.shapes = res.shapes;
    } catch (err) {
      this.shapes = this.shapes.filter((s) => s !== shape); // roll back on 4xx
      throw err;
    }
    await this.refresh();
  }

  placeDisc(x: number, y: number, r = 0.9): Promise<void> {
    return this.addShape({ type: "disc", c: [snapDyadic(x), snapDyadic(y)], r });
  }

  placeAnnulus(x: number, y: number, rIn = 0.5, rOut = 1.1): Promise<void> {
    return this.addShape({
      type: "annulus",
      c: [snapDyadic(x), snapDyadic(y)],
      r_in: rIn,
      r_out: rOut,
    });
  }

  placePolygon(pts: [number, number][]): Promise<void> {
    return this.addShape({
      type: "polygon",
      pts: pts.map(([x, y]) => [snapDyadic(x), snapDyadic(y)] as [number, number]),
    });
  }

  pathPoint(x: number, y: number): void {
    this.pendingPath.push([snapDyadic(x), snapDyadic(y)]);
  }

  async finishPath(radius = 0.5): Promise<void> {
    if (this.pendingPath.length < 2) {
      this.pendingPath = [];
      return;
    }
    const path = this.pendingPath;
    this.pendingPath = [];
    await this.addShape({ type: "tube", path, r: radius });
  }

  async removeShape(index: number): Promise<void> {
    const sid = this.need();
    const res = await this.guard(() => this.api.removeShape(sid, index));
    this.shapes = res.shapes;
    await this.refresh();
  }

  async setNoise(fraction: number, seed = 0): Promise<void> {
    const sid = this.need();
    await this.guard(() => this.api.setNoise(sid, fraction, seed));
    this.noiseFraction = fraction;
    await this.refresh();
  }

  async setSmooth(radius: number): Promise<void> {
    const sid = this.need();
    await this.guard(() => this.api.setSmooth(sid, radius));
    this.smoothRadius = radius;
    await this.refresh();
  }

  async setLevel(s: number): Promise<void> {
    this.level = Math.min(Math.max(0, Math.round(s)), this.maxLevel);
    const sid = this.need();
    this.levelsetData = await this.dedup(`levelset:${sid}:${this.level}`, () =>
      this.guard(() => this.api.levelset(sid, this.level)),
    );
  }

  async refresh(): Promise<void> {
    const sid = this.need();
    this.estimateData = await this.dedup(`estimate:${sid}`, () =>
      this.guard(() => this.api.estimate(sid)),
    );
    this.level = Math.min(this.level, this.maxLevel);
    this.levelsetData = await this.dedup(`levelset:${sid}:${this.level}`, () =>
      this.guard(() => this.api.levelset(sid, this.level)),
    );
  }

  panel(): PanelData {
    return {
      estimate: this.estimateData?.dual_estimate ?? null,
      truth: this.estimateData?.true_integral ?? null,
      smoothed: this.estimateData?.smoothed_estimate ?? null,
      perLevel: this.estimateData?.per_level_beta0 ?? [],
    };
  }
}
