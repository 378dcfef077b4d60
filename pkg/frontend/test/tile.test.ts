import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import {
  HEADER_SIZE,
  decodeTile,
  encodeTile,
  flagAt,
  pixelAt,
  pixelCenter,
} from "../src/tile.js";

const TILE_BYTES = new Uint8Array(
  readFileSync(new URL("../fixtures/slice_lam0_64.cubq", import.meta.url)),
);
const META = JSON.parse(
  readFileSync(new URL("../fixtures/slice_lam0_64.json", import.meta.url), "utf8"),
) as {
  bytes: number;
  pixels: { b: [number, number]; y: number; x: number; u8: number; u16: number }[];
};

describe("decodeTile on the committed service tile", () => {
  const tile = decodeTile(TILE_BYTES);

  it("reads the header the writer produced", () => {
    expect(tile.pair).toEqual({ re: 0, im: 0 });
    expect(tile.window).toEqual([-2.5, -2.5, 2.5, 2.5]);
    expect(tile.nx).toBe(64);
    expect(tile.ny).toBe(64);
    expect(TILE_BYTES.length).toBe(META.bytes);
    expect(TILE_BYTES.length).toBe(HEADER_SIZE + 3 * 64 * 64);
  });

  it("agrees with the writer on every probed pixel", () => {
    expect(META.pixels.length).toBeGreaterThanOrEqual(4);
    for (const p of META.pixels) {
      const i = p.y * tile.nx + p.x;
      expect(tile.u8[i]).toBe(p.u8);
      expect(tile.u16[i]).toBe(p.u16);
    }
  });

  it("re-encodes to the exact committed bytes", () => {
    expect(encodeTile(tile)).toEqual(TILE_BYTES);
  });

  it("sees the full flag nesting at the origin pixel", () => {
    const { y, x } = pixelAt(tile, { re: 0, im: 0 })!;
    expect(flagAt(tile, "in_PHD", y, x)).toBe(true);
    expect(flagAt(tile, "in_P_closure", y, x)).toBe(true);
    expect(flagAt(tile, "in_hull", y, x)).toBe(true);
    expect(flagAt(tile, "in_M3", y, x)).toBe(true);
    expect(flagAt(tile, "escape1", y, x)).toBe(false);
    expect(flagAt(tile, "escape2", y, x)).toBe(false);
  });
});

describe("decodeTile validation", () => {
  it("rejects a short buffer", () => {
    expect(() => decodeTile(TILE_BYTES.slice(0, 10))).toThrow(/shorter/);
  });

  it("rejects a bad magic", () => {
    const bad = TILE_BYTES.slice();
    bad[0] = 0x58;
    expect(() => decodeTile(bad)).toThrow(/magic/);
  });

  it("rejects an unknown version", () => {
    const bad = TILE_BYTES.slice();
    bad[4] = 9;
    expect(() => decodeTile(bad)).toThrow(/version/);
  });

  it("rejects truncated planes", () => {
    expect(() => decodeTile(TILE_BYTES.slice(0, TILE_BYTES.length - 1))).toThrow(
      /expected/,
    );
  });
});

describe("pixel geometry", () => {
  const tile = decodeTile(TILE_BYTES);

  it("pixelCenter and pixelAt are inverse on every cell", () => {
    for (const y of [0, 17, 63]) {
      for (const x of [0, 40, 63]) {
        expect(pixelAt(tile, pixelCenter(tile, y, x))).toEqual({ y, x });
      }
    }
  });

  it("pixelAt returns null outside the window", () => {
    expect(pixelAt(tile, { re: 2.6, im: 0 })).toBeNull();
    expect(pixelAt(tile, { re: 0, im: -2.51 })).toBeNull();
  });
});

describe("dynamical-plane tile", () => {
  const dyn = decodeTile(
    new Uint8Array(
      readFileSync(new URL("../fixtures/dynamics_origin.cubq", import.meta.url)),
    ),
  );

  it("uses the same container with fate codes in the u8 plane", () => {
    expect(dyn.pair).toEqual({ re: 0, im: 0 });
    expect(dyn.nx).toBe(32);
    const codes = new Set(dyn.u8);
    for (const c of codes) {
      expect([0, 1, 2]).toContain(c);
    }
    // z^3 basin: center converges, far field escapes
    const mid = pixelAt(dyn, { re: 0, im: 0 })!;
    expect(dyn.u8[mid.y * dyn.nx + mid.x]).toBe(1);
    expect(dyn.u8[0]).toBe(2);
  });
});
