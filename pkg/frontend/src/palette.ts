// Color legend for slice-tile flag layers. Layers paint lowest priority
// first; the categorical flags never interpolate.

import { FLAG_BITS, type FlagName, type Tile } from "./tile.js";

export type Rgba = [number, number, number, number];

export const PALETTE: Record<string, Rgba> = {
  background: [16, 16, 24, 255],
  escape1: [60, 90, 160, 255],
  escape2: [160, 90, 60, 255],
  escape_both: [50, 50, 60, 255],
  in_M3: [235, 235, 225, 255],
  in_hull: [120, 180, 120, 255],
  in_P_closure: [40, 120, 40, 255],
  in_PHD: [20, 70, 20, 255],
  component: [220, 60, 140, 255],
};

// Painting order: later entries overwrite earlier ones where their flag is
// set, mirroring the nesting in_PHD within in_P_closure within in_hull.
const LAYER_ORDER: FlagName[] = [
  "in_M3",
  "in_hull",
  "in_P_closure",
  "in_PHD",
];

export interface PaintOptions {
  /** flag layers to draw; defaults to all */
  layers?: Set<FlagName>;
  /** paint component pixels (u16 plane nonzero) on top */
  components?: boolean;
  /** component ids whose verdict contradicts the expected taxonomy */
  inconsistentIds?: Set<number>;
}

/**
 * Rasterize a slice tile into an RGBA pixel buffer (length 4*nx*ny).
 *
 * Contradictory components are hatched: alternating diagonals drop to the
 * background color so the region reads as striped.
 */
export function paintTile(tile: Tile, opts: PaintOptions = {}): Uint8ClampedArray {
  const layers = opts.layers ?? new Set<FlagName>(FLAG_BITS);
  const drawComponents = opts.components ?? true;
  const inconsistent = opts.inconsistentIds ?? new Set<number>();
  const n = tile.nx * tile.ny;
  const out = new Uint8ClampedArray(4 * n);
  for (let i = 0; i < n; i++) {
    const flags = tile.u8[i]!;
    let color = PALETTE.background!;
    const esc1 = (flags & 1) !== 0 && layers.has("escape1");
    const esc2 = (flags & 2) !== 0 && layers.has("escape2");
    if (esc1 && esc2) {
      color = PALETTE.escape_both!;
    } else if (esc1) {
      color = PALETTE.escape1!;
    } else if (esc2) {
      color = PALETTE.escape2!;
    }
    for (const name of LAYER_ORDER) {
      const bit = FLAG_BITS.indexOf(name);
      if (layers.has(name) && ((flags >> bit) & 1) === 1) {
        color = PALETTE[name]!;
      }
    }
    const id = tile.u16[i]!;
    if (drawComponents && id > 0) {
      color = PALETTE.component!;
      if (inconsistent.has(id)) {
        const y = Math.floor(i / tile.nx);
        const x = i - y * tile.nx;
        if ((x + y) % 4 < 2) {
          color = PALETTE.background!;
        }
      }
    }
    out[4 * i] = color[0];
    out[4 * i + 1] = color[1];
    out[4 * i + 2] = color[2];
    out[4 * i + 3] = color[3];
  }
  return out;
}
