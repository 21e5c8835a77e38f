// DOM wiring for the explorer: toolbar, canvas, level slider, and the
// estimate panel. Exported as a factory so tests can inject an API stub.

import { ApiClient } from "./api.js";
import { drawAll, WorldTransform } from "./render.js";
import { ExplorerApp, Tool } from "./state.js";

export interface ExplorerDom {
  root: HTMLElement;
  canvas: HTMLCanvasElement;
  panel: HTMLElement;
  banner: HTMLElement;
  slider: HTMLInputElement;
  levelLabel: HTMLElement;
  noiseToggle: HTMLInputElement;
  smoothToggle: HTMLInputElement;
  toolSelect: HTMLSelectElement;
  finishPathButton: HTMLButtonElement;
}

export function initExplorer(
  doc: Document,
  api: ApiClient,
  domain: [number, number, number, number] = [0, 0, 12, 9],
): { app: ExplorerApp; dom: ExplorerDom; redraw: () => void; sync: () => void } {
  const app = new ExplorerApp(api, domain);

  const root = doc.createElement("div");
  root.className = "explorer";

  const banner = doc.createElement("div");
  banner.className = "banner";
  banner.style.display = "none";
  banner.textContent = "connection lost - retrying on next action";
  root.append(banner);

  const bar = doc.createElement("div");
  bar.className = "toolbar";
  const toolSelect = doc.createElement("select");
  for (const tool of ["disc", "annulus", "path", "polygon"]) {
    const opt = doc.createElement("option");
    opt.value = tool;
    opt.textContent = tool;
    toolSelect.append(opt);
  }
  toolSelect.addEventListener("change", () => {
    app.tool = toolSelect.value as Tool;
  });
  bar.append(toolSelect);

  const finishPathButton = doc.createElement("button");
  finishPathButton.textContent = "finish path";
  finishPathButton.addEventListener("click", () => {
    void app.finishPath().then(sync).catch(showError);
  });
  bar.append(finishPathButton);

  const noiseToggle = doc.createElement("input");
  noiseToggle.type = "checkbox";
  noiseToggle.addEventListener("change", () => {
    void app.setNoise(noiseToggle.checked ? 0.1 : 0.0, 3).then(sync).catch(showError);
  });
  bar.append(labelled(doc, noiseToggle, "10% noise"));

  const smoothToggle = doc.createElement("input");
  smoothToggle.type = "checkbox";
  smoothToggle.addEventListener("change", () => {
    if (smoothToggle.checked) {
      void app.setSmooth(0.5).then(sync).catch(showError);
    }
  });
  bar.append(labelled(doc, smoothToggle, "smooth r=0.5"));

  const slider = doc.createElement("input");
  slider.type = "range";
  slider.min = "0";
  slider.max = "0";
  slider.value = "0";
  slider.addEventListener("input", () => {
    void app.setLevel(Number(slider.value)).then(sync).catch(showError);
  });
  const levelLabel = doc.createElement("span");
  levelLabel.textContent = "level 0";
  bar.append(labelled(doc, slider, "level set"), levelLabel);
  root.append(bar);

  const canvas = doc.createElement("canvas");
  canvas.width = 720;
  canvas.height = Math.round((720 * (domain[3] - domain[1])) / (domain[2] - domain[0]));
  canvas.addEventListener("click", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const t = new WorldTransform(app.domain, canvas.width, canvas.height);
    const [x, y] = t.toWorld(ev.clientX - rect.left, ev.clientY - rect.top);
    const done = (p: Promise<void>) => void p.then(sync).catch(showError);
    if (app.tool === "disc") done(app.placeDisc(x, y));
    else if (app.tool === "annulus") done(app.placeAnnulus(x, y));
    else if (app.tool === "path") {
      app.pathPoint(x, y);
      redraw();
    }
  });
  root.append(canvas);

  const panel = doc.createElement("div");
  panel.className = "panel";
  root.append(panel);

  function showError(err: unknown): void {
    banner.style.display = app.connectionLost ? "block" : "none";
    if (!app.connectionLost) {
      banner.style.display = "none";
    }
    sync();
    if (err instanceof Error && !app.connectionLost) {
      panel.dataset.lastError = err.message;
    }
  }

  function redraw(): void {
    const ctx = canvas.getContext ? canvas.getContext("2d") : null;
    if (!ctx) return;
    const t = new WorldTransform(app.domain, canvas.width, canvas.height);
    drawAll(ctx as never, t, app.shapes, app.levelsetData, {
      network: app.overlays.network,
      components: app.overlays.components,
    });
  }

  function sync(): void {
    banner.style.display = app.connectionLost ? "block" : "none";
    const p = app.panel();
    const parts = [
      `estimate ${p.estimate ?? "-"}`,
      `truth ${p.truth ?? "-"}`,
    ];
    if (p.smoothed !== null) parts.push(`smoothed ${p.smoothed.toFixed(2)}`);
    for (const row of p.perLevel) {
      parts.push(`s=${row.s}: b0+ ${row.upper} / b0- ${row.lower}`);
    }
    panel.textContent = parts.join("\n");
    slider.max = String(app.maxLevel);
    levelLabel.textContent = `level ${app.level}`;
    redraw();
  }

  return { app, dom: { root, canvas, panel, banner, slider, levelLabel, noiseToggle, smoothToggle, toolSelect, finishPathButton }, redraw, sync };
}

function labelled(doc: Document, input: HTMLElement, text: string): HTMLElement {
  const label = doc.createElement("label");
  label.append(input, doc.createTextNode(` ${text} `));
  return label;
}

export async function bootstrap(doc: Document, baseUrl: string): Promise<void> {
  const api = new ApiClient(baseUrl);
  const { app, dom, sync } = initExplorer(doc, api);
  doc.body.append(dom.root);
  await app.start();
  sync();
}

declare global {
  interface Window {
    EXPLORER_BASE?: string;
    EXPLORER_AUTOBOOT?: boolean;
  }
}

// index.html opts in; test environments import without booting
if (typeof window !== "undefined" && window.EXPLORER_AUTOBOOT) {
  const base = window.EXPLORER_BASE ?? `${location.protocol}//${location.host}`;
  void bootstrap(document, base);
}
