// Typed client for the explorer service. Every number shown in the UI
// originates from these calls; the frontend does no integral math.

export interface DiscShape {
  type: "disc";
  c: [number, number];
  r: number;
}
export interface PolygonShape {
  type: "polygon";
  pts: [number, number][];
}
export interface AnnulusShape {
  type: "annulus";
  c: [number, number];
  r_in: number;
  r_out: number;
}
export interface TubeShape {
  type: "tube";
  path: [number, number][];
  r: number;
}
export type ShapeJson = DiscShape | PolygonShape | AnnulusShape | TubeShape;

export interface SceneJson {
  domain: [number, number, number, number];
  shapes: ShapeJson[];
}

export interface LevelBeta {
  s: number;
  upper: number;
  lower: number;
}

export interface EstimateResponse {
  dual_estimate: number;
  true_integral: number;
  smoothed_estimate?: number;
  per_level_beta0: LevelBeta[];
}

export interface LevelsetNode {
  id: number;
  xy: [number, number];
  reading: number;
  upper_comp: number | null;
  lower_comp: number | null;
}

export interface LevelsetResponse {
  s: number;
  upper_count: number;
  lower_count: number;
  nodes: LevelsetNode[];
  edges: [number, number][];
}

export interface FieldResponse {
  kind: string;
  xs: number[];
  ys: number[];
  values: number[][];
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private base: string,
    private fetchFn: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async call<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.base}${path}`, init);
    if (!res.ok) {
      throw new ApiError(res.status, await res.text());
    }
    return (await res.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.call<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(
    scene: SceneJson,
    opts: { nodes?: number; seed?: number; resolution?: number } = {},
  ): Promise<{ id: string; comm_radius: number }> {
    return this.post("/sessions", { scene, ...opts });
  }

  addShape(sessionId: string, shape: ShapeJson): Promise<{ shapes: ShapeJson[] }> {
    return this.post(`/sessions/${sessionId}/shapes`, { op: "add", shape });
  }

  removeShape(sessionId: string, index: number): Promise<{ shapes: ShapeJson[] }> {
    return this.post(`/sessions/${sessionId}/shapes`, { op: "remove", index });
  }

  setNoise(sessionId: string, fraction: number, seed = 0): Promise<unknown> {
    return this.post(`/sessions/${sessionId}/noise`, { fraction, seed });
  }

  setSmooth(sessionId: string, radius: number): Promise<unknown> {
    return this.post(`/sessions/${sessionId}/smooth`, { radius });
  }

  estimate(sessionId: string): Promise<EstimateResponse> {
    return this.call(`/sessions/${sessionId}/estimate`);
  }

  levelset(sessionId: string, s: number): Promise<LevelsetResponse> {
    return this.call(`/sessions/${sessionId}/levelset?s=${s}`);
  }

  transform(sessionId: string, kind: "bessel" | "fourier", params = ""): Promise<FieldResponse> {
    return this.call(`/sessions/${sessionId}/transform?kind=${kind}${params}`);
  }
}
