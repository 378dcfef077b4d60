// Tile fetching with the explorer's concurrency rules: at most four tile
// requests in flight, responses for superseded views discarded by token,
// 503 retried after the server's suggested delay.

import { decodeTile, type Tile } from "./tile.js";

export type FetchLike = (url: string) => Promise<{
  status: number;
  headers: { get(name: string): string | null };
  arrayBuffer(): Promise<ArrayBuffer>;
}>;

export type TileResult =
  | { kind: "tile"; tile: Tile }
  | { kind: "stale" }
  | { kind: "error"; message: string };

export const MAX_IN_FLIGHT = 4;
const DEFAULT_RETRY_MS = 1000;
const MAX_ATTEMPTS = 5;

interface Pending {
  url: string;
  token: number;
  resolve: (r: TileResult) => void;
  attempts: number;
}

export class TileLoader {
  private fetchFn: FetchLike;
  private inFlight = 0;
  private queue: Pending[] = [];
  private token = 0;

  constructor(fetchFn: FetchLike = (url) => fetch(url)) {
    this.fetchFn = fetchFn;
  }

  /** Invalidate every outstanding request; their results become stale. */
  bumpToken(): number {
    this.token += 1;
    return this.token;
  }

  get inFlightCount(): number {
    return this.inFlight;
  }

  fetchTile(url: string): Promise<TileResult> {
    return new Promise((resolve) => {
      this.queue.push({ url, token: this.token, resolve, attempts: 0 });
      this.pump();
    });
  }

  private pump(): void {
    while (this.inFlight < MAX_IN_FLIGHT && this.queue.length > 0) {
      const job = this.queue.shift()!;
      if (job.token !== this.token) {
        job.resolve({ kind: "stale" });
        continue;
      }
      this.inFlight += 1;
      void this.run(job);
    }
  }

  private async run(job: Pending): Promise<void> {
    try {
      const resp = await this.fetchFn(job.url);
      if (job.token !== this.token) {
        job.resolve({ kind: "stale" });
        return;
      }
      if (resp.status === 503) {
        job.attempts += 1;
        if (job.attempts >= MAX_ATTEMPTS) {
          job.resolve({ kind: "error", message: "server busy, giving up" });
          return;
        }
        const after = Number(resp.headers.get("Retry-After")) || 0;
        const delay = after > 0 ? after * 1000 : DEFAULT_RETRY_MS;
        setTimeout(() => {
          if (job.token !== this.token) {
            job.resolve({ kind: "stale" });
            return;
          }
          this.queue.push(job);
          this.pump();
        }, delay);
        return;
      }
      if (resp.status !== 200) {
        job.resolve({ kind: "error", message: `tile request failed: ${resp.status}` });
        return;
      }
      const buf = await resp.arrayBuffer();
      if (job.token !== this.token) {
        job.resolve({ kind: "stale" });
        return;
      }
      try {
        job.resolve({ kind: "tile", tile: decodeTile(buf) });
      } catch (err) {
        job.resolve({ kind: "error", message: `tile decode failed: ${String(err)}` });
      }
    } catch (err) {
      job.resolve({ kind: "error", message: `network error: ${String(err)}` });
    } finally {
      this.inFlight -= 1;
      this.pump();
    }
  }
}

export function sliceUrl(
  base: string,
  lambda: { re: number; im: number },
  window: [number, number, number, number],
  res: number,
  budget: number,
): string {
  const q = new URLSearchParams({
    lambda_re: String(lambda.re),
    lambda_im: String(lambda.im),
    x0: String(window[0]),
    y0: String(window[1]),
    x1: String(window[2]),
    y1: String(window[3]),
    res: String(res),
    budget: String(budget),
  });
  return `${base}/api/slice?${q.toString()}`;
}
