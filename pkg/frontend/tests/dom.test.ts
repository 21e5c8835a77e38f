// @vitest-environment happy-dom
// DOM wiring: canvas clicks place shapes through the API, the slider
// drives level-set fetches, and the panel renders service numbers.

import { describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { componentColor } from "../src/render.js";
import { initExplorer } from "../src/main.js";

function fakeFetch() {
  const calls: { url: string; body?: unknown }[] = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    calls.push({ url, body });
    const respond = (p: unknown) => new Response(JSON.stringify(p), { status: 200 });
    if (url.endsWith("/sessions")) return respond({ id: "s9", comm_radius: 0.4 });
    if (url.endsWith("/shapes")) return respond({ shapes: [body && (body as { shape: unknown }).shape].filter(Boolean) });
    if (url.includes("/estimate"))
      return respond({
        dual_estimate: 6,
        true_integral: 6,
        per_level_beta0: [{ s: 0, upper: 6, lower: 1 }],
      });
    if (url.includes("/levelset"))
      return respond({
        s: 0,
        upper_count: 6,
        lower_count: 1,
        nodes: [{ id: 0, xy: [1, 1], reading: 1, upper_comp: 2, lower_comp: null }],
        edges: [],
      });
    return respond({});
  };
  return { calls, fetchFn };
}

describe("explorer dom", () => {
  it("wires canvas clicks and the level slider to API calls", async () => {
    const svc = fakeFetch();
    const api = new ApiClient("http://svc", svc.fetchFn);
    const { app, dom, sync } = initExplorer(document, api, [0, 0, 12, 9]);
    document.body.append(dom.root);
    await app.start();
    sync();
    expect(dom.panel.textContent).toContain("estimate 6");
    expect(dom.panel.textContent).toContain("truth 6");

    dom.canvas.dispatchEvent(new MouseEvent("click", { clientX: 120, clientY: 100 }));
    await new Promise((r) => setTimeout(r, 10));
    const add = svc.calls.find((c) => c.url.endsWith("/shapes"));
    expect(add).toBeDefined();
    expect((add?.body as { op: string }).op).toBe("add");

    svc.calls.length = 0;
    dom.slider.max = "2";
    dom.slider.value = "1";
    dom.slider.dispatchEvent(new Event("input"));
    await new Promise((r) => setTimeout(r, 10));
    expect(svc.calls.some((c) => c.url.includes("levelset?s="))).toBe(true);
  });

  it("colors components from the payload labels only", () => {
    expect(componentColor(1, "upper")).not.toBe(componentColor(2, "upper"));
    expect(componentColor(1, "upper")).not.toBe(componentColor(1, "lower"));
    expect(componentColor(null, "upper")).toBe("#dddddd");
    // deterministic mapping: same label, same color
    expect(componentColor(3, "lower")).toBe(componentColor(3, "lower"));
  });
});
