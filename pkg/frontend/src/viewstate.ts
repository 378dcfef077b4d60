// Shareable view state, serialized into the URL fragment so any view can
// be bookmarked or pasted and reproduced exactly.

import type { Complex, Window } from "./tile.js";

export interface OverlayToggles {
  petals: boolean;
  rays: boolean;
  components: boolean;
}

export interface ViewState {
  lambda: Complex;
  bWindow: Window;
  zoom: number;
  selectedB: Complex | null;
  overlays: OverlayToggles;
}

export const DEFAULT_VIEW: ViewState = {
  lambda: { re: 0, im: 0 },
  bWindow: [-2.5, -2.5, 2.5, 2.5],
  zoom: 0,
  selectedB: null,
  overlays: { petals: false, rays: false, components: true },
};

const OVERLAY_KEYS: (keyof OverlayToggles)[] = ["petals", "rays", "components"];

// String(number) round-trips IEEE doubles exactly, so plain decimal text is
// enough for a lossless fragment.
function nums(...vs: number[]): string {
  return vs.map((v) => String(v)).join(",");
}

export function toFragment(view: ViewState): string {
  const parts = [
    `lam=${nums(view.lambda.re, view.lambda.im)}`,
    `win=${nums(...view.bWindow)}`,
    `zoom=${view.zoom}`,
  ];
  if (view.selectedB !== null) {
    parts.push(`sel=${nums(view.selectedB.re, view.selectedB.im)}`);
  }
  const on = OVERLAY_KEYS.filter((k) => view.overlays[k]);
  if (on.length > 0) {
    parts.push(`ov=${on.join(",")}`);
  }
  return parts.join("&");
}

export function fromFragment(fragment: string): ViewState | null {
  const text = fragment.startsWith("#") ? fragment.slice(1) : fragment;
  if (!text) {
    return null;
  }
  const fields = new Map<string, string>();
  for (const part of text.split("&")) {
    const eq = part.indexOf("=");
    if (eq < 0) {
      return null;
    }
    fields.set(part.slice(0, eq), part.slice(eq + 1));
  }
  const lam = parseNums(fields.get("lam"), 2);
  const win = parseNums(fields.get("win"), 4);
  const zoomText = fields.get("zoom");
  if (!lam || !win || zoomText === undefined) {
    return null;
  }
  const zoom = Number(zoomText);
  if (!Number.isInteger(zoom)) {
    return null;
  }
  let selectedB: Complex | null = null;
  if (fields.has("sel")) {
    const sel = parseNums(fields.get("sel"), 2);
    if (!sel) {
      return null;
    }
    selectedB = { re: sel[0]!, im: sel[1]! };
  }
  const overlays: OverlayToggles = { petals: false, rays: false, components: false };
  const ov = fields.get("ov");
  if (ov) {
    for (const name of ov.split(",")) {
      if (!OVERLAY_KEYS.includes(name as keyof OverlayToggles)) {
        return null;
      }
      overlays[name as keyof OverlayToggles] = true;
    }
  }
  return {
    lambda: { re: lam[0]!, im: lam[1]! },
    bWindow: [win[0]!, win[1]!, win[2]!, win[3]!],
    zoom,
    selectedB,
    overlays,
  };
}

function parseNums(text: string | undefined, count: number): number[] | null {
  if (text === undefined) {
    return null;
  }
  const parts = text.split(",");
  if (parts.length !== count) {
    return null;
  }
  const out: number[] = [];
  for (const p of parts) {
    const v = Number(p);
    if (p === "" || Number.isNaN(v)) {
      return null;
    }
    out.push(v);
  }
  return out;
}

/** The b-window for a zoom step: each level halves the span around a center. */
export function zoomWindow(base: Window, center: Complex, zoom: number): Window {
  const scale = Math.pow(2, -zoom);
  const hw = ((base[2] - base[0]) / 2) * scale;
  const hh = ((base[3] - base[1]) / 2) * scale;
  return [center.re - hw, center.im - hh, center.re + hw, center.im + hh];
}
