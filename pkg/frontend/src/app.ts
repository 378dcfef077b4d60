// Browser entry point: wires the canvas, the URL fragment, and the side
// panel together. All logic that is worth testing lives in the sibling
// modules; this file is DOM glue.

import { pixelAt, type Complex, type Tile } from "./tile.js";
import {
  DEFAULT_VIEW,
  fromFragment,
  toFragment,
  zoomWindow,
  type ViewState,
} from "./viewstate.js";
import { paintTile } from "./palette.js";
import { TileLoader, sliceUrl } from "./net.js";
import { inspectPoint, InspectionHistory, type InspectionPanel } from "./inspect.js";
import type { FlagName } from "./tile.js";

const TILE_RES = 512;
const TILE_BUDGET = 4096;
const SERVICE_BASE = "";

interface App {
  view: ViewState;
  tile: Tile | null;
  loader: TileLoader;
  history: InspectionHistory;
  canvas: HTMLCanvasElement;
  status: HTMLElement;
  panel: HTMLElement;
  layerBoxes: Map<FlagName, HTMLInputElement>;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id} in the page`);
  }
  return node as T;
}

function setStatus(app: App, text: string, isError = false): void {
  app.status.textContent = text;
  app.status.classList.toggle("error", isError);
}

function activeLayers(app: App): Set<FlagName> {
  const layers = new Set<FlagName>();
  for (const [name, box] of app.layerBoxes) {
    if (box.checked) {
      layers.add(name);
    }
  }
  return layers;
}

function repaint(app: App): void {
  if (!app.tile) {
    return;
  }
  const tile = app.tile;
  app.canvas.width = tile.nx;
  app.canvas.height = tile.ny;
  const ctx = app.canvas.getContext("2d");
  if (!ctx) {
    return;
  }
  const rgba = paintTile(tile, {
    layers: activeLayers(app),
    components: app.view.overlays.components,
  });
  // the raster's y axis points up; canvas rows run downward
  const img = new ImageData(tile.nx, tile.ny);
  for (let y = 0; y < tile.ny; y++) {
    const src = 4 * (tile.ny - 1 - y) * tile.nx;
    img.data.set(rgba.subarray(src, src + 4 * tile.nx), 4 * y * tile.nx);
  }
  ctx.putImageData(img, 0, 0);
}

async function loadTile(app: App): Promise<void> {
  app.loader.bumpToken();
  setStatus(app, "computing tile…");
  const url = sliceUrl(
    SERVICE_BASE,
    app.view.lambda,
    app.view.bWindow,
    TILE_RES,
    TILE_BUDGET,
  );
  const result = await app.loader.fetchTile(url);
  if (result.kind === "stale") {
    return;
  }
  if (result.kind === "error") {
    setStatus(app, result.message, true);
    return;
  }
  app.tile = result.tile;
  setStatus(app, `λ = ${app.view.lambda.re} + ${app.view.lambda.im}i`);
  repaint(app);
}

function syncFragment(app: App): void {
  const frag = toFragment(app.view);
  if (window.location.hash.slice(1) !== frag) {
    window.history.replaceState(null, "", `#${frag}`);
  }
}

function renderPanel(app: App, panel: InspectionPanel): void {
  const rows: string[] = [];
  rows.push(`<h3>b = ${panel.b.re.toPrecision(6)} + ${panel.b.im.toPrecision(6)}i</h3>`);
  if (panel.verdict) {
    rows.push(`<p class="verdict">${panel.verdict}</p>`);
  }
  if (panel.captureTime !== null) {
    rows.push(`<p>capture at iterate ${panel.captureTime}</p>`);
  }
  if (panel.siegelRadius !== null) {
    rows.push(`<p>probe radius ${panel.siegelRadius.toPrecision(4)}</p>`);
  }
  if (panel.error) {
    rows.push(`<p class="error">${panel.error}</p>`);
  }
  const past = app.history.entries
    .slice(0, -1)
    .map((p) => `<li>${p.b.re.toPrecision(4)}+${p.b.im.toPrecision(4)}i: ${p.verdict ?? "?"}</li>`)
    .reverse();
  if (past.length > 0) {
    rows.push(`<h4>earlier probes</h4><ul>${past.join("")}</ul>`);
  }
  app.panel.innerHTML = rows.join("\n");
  if (panel.dynamics) {
    const tile = panel.dynamics;
    const dyn = document.createElement("canvas");
    dyn.width = tile.nx;
    dyn.height = tile.ny;
    const ctx = dyn.getContext("2d");
    if (ctx) {
      const img = ctx.createImageData(tile.nx, tile.ny);
      const codes = tile.u8;
      for (let i = 0; i < codes.length; i++) {
        // rows flipped so the imaginary axis points up
        const y = tile.ny - 1 - Math.floor(i / tile.nx);
        const j = y * tile.nx + (i % tile.nx);
        const c = codes[i]!;
        img.data[4 * j] = c === 2 ? 60 : c === 1 ? 30 : 10;
        img.data[4 * j + 1] = c === 2 ? 90 : c === 1 ? 120 : 10;
        img.data[4 * j + 2] = c === 2 ? 160 : c === 1 ? 60 : 16;
        img.data[4 * j + 3] = 255;
      }
      ctx.putImageData(img, 0, 0);
      const [x0, y0, x1, y1] = tile.window;
      const toPx = (p: Complex): [number, number] => [
        ((p.re - x0) / (x1 - x0)) * tile.nx,
        (1 - (p.im - y0) / (y1 - y0)) * tile.ny,
      ];
      if (panel.rays) {
        ctx.strokeStyle = "rgba(255, 220, 100, 0.9)";
        ctx.lineWidth = 1;
        for (const ray of panel.rays) {
          if (ray.points.length < 2) {
            continue;
          }
          ctx.beginPath();
          ctx.moveTo(...toPx(ray.points[0]!));
          for (const p of ray.points.slice(1)) {
            ctx.lineTo(...toPx(p));
          }
          ctx.stroke();
        }
      }
      if (panel.petal) {
        // repelling directions drawn outward from the parabolic point at 0
        ctx.strokeStyle = "rgba(255, 100, 100, 0.9)";
        const len = (x1 - x0) / 4;
        for (const v of panel.petal.repellingVectors) {
          ctx.beginPath();
          ctx.moveTo(...toPx({ re: 0, im: 0 }));
          ctx.lineTo(...toPx({ re: v.re * len, im: v.im * len }));
          ctx.stroke();
        }
      }
      app.panel.appendChild(dyn);
    }
  }
}

async function onClick(app: App, ev: MouseEvent): Promise<void> {
  if (!app.tile) {
    return;
  }
  const rect = app.canvas.getBoundingClientRect();
  const px = ((ev.clientX - rect.left) / rect.width) * app.tile.nx;
  const py = (1 - (ev.clientY - rect.top) / rect.height) * app.tile.ny;
  const [x0, y0, x1, y1] = app.tile.window;
  const b: Complex = {
    re: x0 + (px / app.tile.nx) * (x1 - x0),
    im: y0 + (py / app.tile.ny) * (y1 - y0),
  };
  if (ev.shiftKey) {
    // shift-click zooms in around the point instead of inspecting it
    app.view.zoom += 1;
    app.view.bWindow = zoomWindow(DEFAULT_VIEW.bWindow, b, app.view.zoom);
    syncFragment(app);
    await loadTile(app);
    return;
  }
  app.view.selectedB = b;
  syncFragment(app);
  setStatus(app, "classifying…");
  const panel = await inspectPoint(
    (url) => fetch(url),
    SERVICE_BASE,
    app.view.lambda,
    b,
    { petals: app.view.overlays.petals, rays: app.view.overlays.rays },
  );
  app.history.push(panel);
  renderPanel(app, panel);
  if (pixelAt(app.tile, b)) {
    setStatus(app, panel.verdict ?? panel.error ?? "no verdict");
  }
}

function readLambdaInputs(app: App): void {
  const re = Number((el<HTMLInputElement>("lam-re")).value);
  const im = Number((el<HTMLInputElement>("lam-im")).value);
  if (Number.isNaN(re) || Number.isNaN(im)) {
    setStatus(app, "multiplier fields must be numbers", true);
    return;
  }
  if (re * re + im * im > 1 + 1e-12) {
    setStatus(app, "multiplier outside closed unit disk", true);
    return;
  }
  app.view.lambda = { re, im };
  app.view.zoom = 0;
  app.view.bWindow = DEFAULT_VIEW.bWindow;
  app.view.selectedB = null;
  syncFragment(app);
  void loadTile(app);
}

export function boot(): void {
  const canvas = el<HTMLCanvasElement>("slice");
  const app: App = {
    view: fromFragment(window.location.hash) ?? structuredClone(DEFAULT_VIEW),
    tile: null,
    loader: new TileLoader(),
    history: new InspectionHistory(),
    canvas,
    status: el("status"),
    panel: el("panel"),
    layerBoxes: new Map(),
  };
  const names: FlagName[] = [
    "escape1",
    "escape2",
    "in_M3",
    "in_PHD",
    "in_P_closure",
    "in_hull",
  ];
  for (const name of names) {
    const box = el<HTMLInputElement>(`layer-${name}`);
    box.addEventListener("change", () => repaint(app));
    app.layerBoxes.set(name, box);
  }
  for (const key of ["components", "rays", "petals"] as const) {
    const box = el<HTMLInputElement>(`ov-${key}`);
    box.checked = app.view.overlays[key];
    box.addEventListener("change", () => {
      app.view.overlays[key] = box.checked;
      syncFragment(app);
      repaint(app);
    });
  }
  el<HTMLInputElement>("lam-re").value = String(app.view.lambda.re);
  el<HTMLInputElement>("lam-im").value = String(app.view.lambda.im);
  el("lam-go").addEventListener("click", () => readLambdaInputs(app));
  el("zoom-out").addEventListener("click", () => {
    app.view.zoom = Math.max(0, app.view.zoom - 1);
    const [x0, y0, x1, y1] = app.view.bWindow;
    const center: Complex = { re: (x0 + x1) / 2, im: (y0 + y1) / 2 };
    app.view.bWindow =
      app.view.zoom === 0
        ? DEFAULT_VIEW.bWindow
        : zoomWindow(DEFAULT_VIEW.bWindow, center, app.view.zoom);
    syncFragment(app);
    void loadTile(app);
  });
  canvas.addEventListener("click", (ev) => {
    void onClick(app, ev);
  });
  window.addEventListener("hashchange", () => {
    const next = fromFragment(window.location.hash);
    if (next) {
      app.view = next;
      void loadTile(app);
    }
  });
  syncFragment(app);
  void loadTile(app);
}

boot();
