// Binary tile container, mirroring the service's writer bit for bit.
//
// Layout, little-endian throughout:
//   magic   4 bytes "CUBQ"
//   version u16
//   pair    2 x f64 (lambda for slice tiles, b for dynamical tiles)
//   window  4 x f64 (x0, y0, x1, y1)
//   res     2 x u32 (nx, ny)
//   u8 plane  ny*nx row-major (flag bitfield, or fate codes)
//   u16 plane ny*nx row-major (component ids, or basin labels)

export const TILE_MAGIC = "CUBQ";
export const TILE_VERSION = 1;
export const HEADER_SIZE = 62;

export const FLAG_BITS = [
  "escape1",
  "escape2",
  "in_M3",
  "in_PHD",
  "in_P_closure",
  "in_hull",
] as const;

export type FlagName = (typeof FLAG_BITS)[number];

export interface Complex {
  re: number;
  im: number;
}

export type Window = [number, number, number, number];

export interface Tile {
  pair: Complex;
  window: Window;
  nx: number;
  ny: number;
  /** row-major ny*nx flag bitfield (slice) or fate codes (dynamics) */
  u8: Uint8Array;
  /** row-major ny*nx component ids (slice) or basin labels (dynamics) */
  u16: Uint16Array;
}

export function decodeTile(buf: ArrayBuffer | Uint8Array): Tile {
  const bytes = buf instanceof Uint8Array ? buf : new Uint8Array(buf);
  if (bytes.length < HEADER_SIZE) {
    throw new Error(`tile is ${bytes.length} bytes, shorter than the header`);
  }
  const magic = String.fromCharCode(bytes[0]!, bytes[1]!, bytes[2]!, bytes[3]!);
  if (magic !== TILE_MAGIC) {
    throw new Error("not a tile: bad magic");
  }
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const version = view.getUint16(4, true);
  if (version !== TILE_VERSION) {
    throw new Error(`unsupported tile version ${version}`);
  }
  const pair = { re: view.getFloat64(6, true), im: view.getFloat64(14, true) };
  const window: Window = [
    view.getFloat64(22, true),
    view.getFloat64(30, true),
    view.getFloat64(38, true),
    view.getFloat64(46, true),
  ];
  const nx = view.getUint32(54, true);
  const ny = view.getUint32(58, true);
  const n = nx * ny;
  const expected = HEADER_SIZE + 3 * n;
  if (bytes.length !== expected) {
    throw new Error(`tile is ${bytes.length} bytes, expected ${expected}`);
  }
  const u8 = bytes.slice(HEADER_SIZE, HEADER_SIZE + n);
  const u16 = new Uint16Array(n);
  for (let i = 0; i < n; i++) {
    u16[i] = view.getUint16(HEADER_SIZE + n + 2 * i, true);
  }
  return { pair, window, nx, ny, u8, u16 };
}

export function encodeTile(tile: Tile): Uint8Array {
  const n = tile.nx * tile.ny;
  if (tile.u8.length !== n || tile.u16.length !== n) {
    throw new Error("plane size does not match resolution");
  }
  const out = new Uint8Array(HEADER_SIZE + 3 * n);
  const view = new DataView(out.buffer);
  for (let i = 0; i < 4; i++) {
    out[i] = TILE_MAGIC.charCodeAt(i);
  }
  view.setUint16(4, TILE_VERSION, true);
  view.setFloat64(6, tile.pair.re, true);
  view.setFloat64(14, tile.pair.im, true);
  for (let i = 0; i < 4; i++) {
    view.setFloat64(22 + 8 * i, tile.window[i]!, true);
  }
  view.setUint32(54, tile.nx, true);
  view.setUint32(58, tile.ny, true);
  out.set(tile.u8, HEADER_SIZE);
  for (let i = 0; i < n; i++) {
    view.setUint16(HEADER_SIZE + n + 2 * i, tile.u16[i]!, true);
  }
  return out;
}

export function flagAt(tile: Tile, name: FlagName, y: number, x: number): boolean {
  const bit = FLAG_BITS.indexOf(name);
  return ((tile.u8[y * tile.nx + x]! >> bit) & 1) === 1;
}

/** Pixel center in the complex plane for a raster coordinate. */
export function pixelCenter(tile: Tile, y: number, x: number): Complex {
  const [x0, y0, x1, y1] = tile.window;
  return {
    re: x0 + ((x + 0.5) / tile.nx) * (x1 - x0),
    im: y0 + ((y + 0.5) / tile.ny) * (y1 - y0),
  };
}

/** Raster coordinate for a point in the complex plane, or null outside. */
export function pixelAt(tile: Tile, b: Complex): { y: number; x: number } | null {
  const [x0, y0, x1, y1] = tile.window;
  const x = Math.floor(((b.re - x0) / (x1 - x0)) * tile.nx);
  const y = Math.floor(((b.im - y0) / (y1 - y0)) * tile.ny);
  if (x < 0 || x >= tile.nx || y < 0 || y >= tile.ny) {
    return null;
  }
  return { y, x };
}
