// View-model tests against an intercepted API: every number the panel
// shows must originate from the service responses.

import { describe, expect, it } from "vitest";
import { ApiClient, EstimateResponse, LevelsetResponse } from "../src/api.js";
import { ExplorerApp, snapDyadic } from "../src/state.js";

interface Call {
  url: string;
  body?: unknown;
}

function fakeService() {
  const calls: Call[] = [];
  let shapes: unknown[] = [];
  // the fake service invents numbers the client could never compute
  const estimate: EstimateResponse = {
    dual_estimate: 41,
    true_integral: 43,
    per_level_beta0: [
      { s: 0, upper: 5, lower: 2 },
      { s: 1, upper: 1, lower: 1 },
    ],
  };
  const levelset: LevelsetResponse = {
    s: 0,
    upper_count: 5,
    lower_count: 2,
    nodes: [
      { id: 0, xy: [1, 1], reading: 1, upper_comp: 1, lower_comp: null },
      { id: 1, xy: [2, 2], reading: 0, upper_comp: null, lower_comp: 1 },
    ],
    edges: [[0, 1]],
  };
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    calls.push({ url, body });
    const respond = (payload: unknown, status = 200) =>
      new Response(JSON.stringify(payload), { status });
    if (url.endsWith("/sessions")) return respond({ id: "s1", comm_radius: 0.5 });
    if (url.endsWith("/shapes")) {
      const op = (body as { op: string }).op;
      if (op === "add") {
        const shape = (body as { shape: { r?: number } }).shape;
        if (shape.r !== undefined && shape.r < 0) return respond({ detail: "bad" }, 422);
        shapes.push(shape);
      }
      return respond({ shapes });
    }
    if (url.includes("/estimate")) return respond(estimate);
    if (url.includes("/levelset")) return respond({ ...levelset, s: Number(url.split("=")[1]) });
    if (url.includes("/noise") || url.includes("/smooth")) return respond({});
    return respond({ detail: "not found" }, 404);
  };
  return { calls, fetchFn, estimate };
}

describe("explorer view-model", () => {
  it("shows only service-reported numbers", async () => {
    const svc = fakeService();
    const app = new ExplorerApp(new ApiClient("http://test", svc.fetchFn));
    await app.start();
    await app.placeDisc(1.5, 1.5);
    const panel = app.panel();
    // 41/43 are the service's invented values; the client has no way to
    // derive them from two discs, proving the numbers are pass-through
    expect(panel.estimate).toBe(41);
    expect(panel.truth).toBe(43);
    expect(panel.perLevel).toEqual(svc.estimate.per_level_beta0);
    const estimateCalls = svc.calls.filter((c) => c.url.includes("/estimate"));
    expect(estimateCalls.length).toBeGreaterThan(0);
  });

  it("snaps placements to the dyadic grid", async () => {
    const svc = fakeService();
    const app = new ExplorerApp(new ApiClient("http://test", svc.fetchFn));
    await app.start();
    await app.placeDisc(1.503, 2.251);
    const add = svc.calls.find((c) => c.url.endsWith("/shapes"));
    const shape = (add?.body as { shape: { c: [number, number] } }).shape;
    expect(shape.c[0]).toBe(snapDyadic(1.503));
    expect(shape.c[0] * 16).toBeCloseTo(Math.round(shape.c[0] * 16));
  });

  it("rolls back optimistic shapes on 4xx", async () => {
    const svc = fakeService();
    const app = new ExplorerApp(new ApiClient("http://test", svc.fetchFn));
    await app.start();
    await expect(app.placeDisc(1, 1, -5)).rejects.toThrow();
    expect(app.shapes.length).toBe(0);
    expect(app.connectionLost).toBe(false); // a 4xx is not a connection loss
  });

  it("flags connection loss on network failure", async () => {
    const app = new ExplorerApp(
      new ApiClient("http://test", async () => {
        throw new Error("ECONNREFUSED");
      }),
    );
    await expect(app.start()).rejects.toThrow();
    expect(app.connectionLost).toBe(true);
  });

  it("clamps the level slider to the reported range", async () => {
    const svc = fakeService();
    const app = new ExplorerApp(new ApiClient("http://test", svc.fetchFn));
    await app.start();
    expect(app.maxLevel).toBe(1);
    await app.setLevel(7);
    expect(app.level).toBe(1);
    await app.setLevel(-2);
    expect(app.level).toBe(0);
  });

  it("dedups concurrent estimate requests", async () => {
    const svc = fakeService();
    const app = new ExplorerApp(new ApiClient("http://test", svc.fetchFn));
    await app.start();
    svc.calls.length = 0;
    await Promise.all([app.refresh(), app.refresh(), app.refresh()]);
    const estimates = svc.calls.filter((c) => c.url.includes("/estimate"));
    expect(estimates.length).toBe(1);
  });

  it("builds tube shapes from path points", async () => {
    const svc = fakeService();
    const app = new ExplorerApp(new ApiClient("http://test", svc.fetchFn));
    await app.start();
    app.pathPoint(1, 1);
    app.pathPoint(2, 2.5);
    app.pathPoint(4, 2);
    await app.finishPath(0.4);
    const add = svc.calls.find((c) => c.url.endsWith("/shapes") && (c.body as { op: string }).op === "add");
    const shape = (add?.body as { shape: { type: string; path: unknown[] } }).shape;
    expect(shape.type).toBe("tube");
    expect(shape.path.length).toBe(3);
    expect(app.pendingPath.length).toBe(0);
  });
});
