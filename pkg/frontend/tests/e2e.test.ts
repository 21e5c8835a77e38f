// End-to-end against the real service: place six discs and read 6/6,
// toggle noise+smoothing and verify the smoothed estimate is strictly
// closer to the truth, and check level-set recoloring against the
// payloads.

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, ChildProcess } from "node:child_process";
import { ApiClient } from "../src/api.js";
import { ExplorerApp } from "../src/state.js";
import { componentColor } from "../src/render.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;
let service: ChildProcess;

async function waitForService(): Promise<void> {
  for (let i = 0; i < 120; i++) {
    try {
      const res = await fetch(`${BASE}/docs`);
      if (res.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  service = spawn(
    "python3",
    ["-m", "eulercalc.cli", "serve", "--port", String(PORT), "--host", "127.0.0.1"],
    { stdio: "ignore" },
  );
  await waitForService();
}, 60_000);

afterAll(() => {
  service?.kill();
});

describe("explorer end to end", () => {
  it("places six discs and shows 6/6, then noise+smooth narrows the gap", async () => {
    const api = new ApiClient(BASE);
    const app = new ExplorerApp(api, [0, 0, 9, 6], { nodes: 900, seed: 7, resolution: 128 });
    await app.start();
    for (let k = 0; k < 6; k++) {
      await app.placeDisc(1.5 + 3 * (k % 3), 1.5 + 3 * Math.floor(k / 3), 1.0);
    }
    let panel = app.panel();
    expect(panel.truth).toBe(6);
    expect(panel.estimate).toBe(6);

    await app.setNoise(0.1, 3);
    const naive = app.panel().estimate as number;
    await app.setSmooth(0.5);
    panel = app.panel();
    const truth = panel.truth as number;
    expect(panel.smoothed).not.toBeNull();
    expect(Math.abs((panel.smoothed as number) - truth)).toBeLessThan(
      Math.abs(naive - truth),
    );
  }, 120_000);

  it("recolors level sets consistently with the levelset payloads", async () => {
    const api = new ApiClient(BASE);
    const app = new ExplorerApp(api, [0, 0, 9, 6], { nodes: 700, seed: 5, resolution: 96 });
    await app.start();
    await app.placeDisc(3, 3, 1.2);
    await app.placeDisc(4, 3, 1.2); // overlap so level 1 is nonempty
    expect(app.maxLevel).toBeGreaterThanOrEqual(1);

    await app.setLevel(0);
    const ls0 = app.levelsetData!;
    expect(ls0.s).toBe(0);
    const colors0 = new Map(
      ls0.nodes.map((n) => [
        n.id,
        n.upper_comp !== null
          ? componentColor(n.upper_comp, "upper")
          : componentColor(n.lower_comp, "lower"),
      ]),
    );
    // membership consistency: reading > s exactly when an upper label exists
    for (const n of ls0.nodes) {
      expect(n.upper_comp !== null).toBe(n.reading > 0);
      expect(n.lower_comp !== null).toBe(n.reading <= 0);
    }
    // nodes in the same upper component share a color
    const byComp = new Map<number, Set<string>>();
    for (const n of ls0.nodes) {
      if (n.upper_comp !== null) {
        const set = byComp.get(n.upper_comp) ?? new Set<string>();
        set.add(colors0.get(n.id)!);
        byComp.set(n.upper_comp, set);
      }
    }
    for (const colors of byComp.values()) expect(colors.size).toBe(1);

    await app.setLevel(1);
    const ls1 = app.levelsetData!;
    expect(ls1.s).toBe(1);
    for (const n of ls1.nodes) {
      expect(n.upper_comp !== null).toBe(n.reading > 1);
    }
    // the recoloring tracks the payload: the overlap lens keeps an upper
    // color at level 1 while single-covered nodes flip to lower shades
    const lensNodes = ls1.nodes.filter((n) => n.reading > 1);
    expect(lensNodes.length).toBeGreaterThan(0);
    const single = ls1.nodes.find((n) => n.reading === 1)!;
    const colorAt0 = colors0.get(single.id)!;
    const colorAt1 =
      single.upper_comp !== null
        ? componentColor(single.upper_comp, "upper")
        : componentColor(single.lower_comp, "lower");
    expect(colorAt1).not.toBe(colorAt0);
  }, 120_000);
});
