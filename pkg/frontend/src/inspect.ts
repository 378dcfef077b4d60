// Point inspection: fetch the verdict and the dynamical-plane raster for a
// clicked b, and keep a history of inspected points for comparison.

import { decodeTile, type Complex, type Tile } from "./tile.js";

export interface ClassifyResponse {
  tag: string;
  evidence: Record<string, unknown>;
}

/** One traced external ray: polyline in dynamical-plane coordinates. */
export interface RayOverlay {
  angle: string;
  status: string;
  points: Complex[];
}

export interface PetalOverlay {
  /** unit directions of the repelling vectors at the parabolic point */
  repellingVectors: Complex[];
}

export interface OverlayRequest {
  petals: boolean;
  rays: boolean;
}

export interface InspectionPanel {
  lambda: Complex;
  b: Complex;
  verdict: string | null;
  /** forward iterate count at which the capture evidence fired, if any */
  captureTime: number | null;
  /** Siegel probe radius from the evidence, if any */
  siegelRadius: number | null;
  evidence: Record<string, unknown>;
  dynamics: Tile | null;
  rays: RayOverlay[] | null;
  petal: PetalOverlay | null;
  error: string | null;
}

export type JsonFetch = (url: string) => Promise<{
  status: number;
  json(): Promise<unknown>;
  arrayBuffer(): Promise<ArrayBuffer>;
}>;

function asNumber(v: unknown): number | null {
  return typeof v === "number" && Number.isFinite(v) ? v : null;
}

function asComplex(v: unknown): Complex | null {
  if (Array.isArray(v) && v.length === 2) {
    const [re, im] = v as [unknown, unknown];
    if (typeof re === "number" && typeof im === "number") {
      return { re, im };
    }
  }
  return null;
}

function setError(panel: InspectionPanel, message: string): void {
  // first failure wins the inline slot; a verdict already shown stays shown
  panel.error = panel.error ?? message;
}

export async function inspectPoint(
  fetchFn: JsonFetch,
  base: string,
  lambda: Complex,
  b: Complex,
  overlays: OverlayRequest = { petals: false, rays: false },
): Promise<InspectionPanel> {
  const panel: InspectionPanel = {
    lambda,
    b,
    verdict: null,
    captureTime: null,
    siegelRadius: null,
    evidence: {},
    dynamics: null,
    rays: null,
    petal: null,
    error: null,
  };
  const common = {
    lambda_re: String(lambda.re),
    lambda_im: String(lambda.im),
    b_re: String(b.re),
    b_im: String(b.im),
  };
  try {
    const resp = await fetchFn(`${base}/api/classify?${new URLSearchParams(common)}`);
    if (resp.status !== 200) {
      const body = (await resp.json()) as { detail?: string };
      panel.error = body.detail ?? `classify failed: ${resp.status}`;
      return panel;
    }
    const out = (await resp.json()) as ClassifyResponse;
    panel.verdict = out.tag;
    panel.evidence = out.evidence ?? {};
    panel.captureTime = asNumber(panel.evidence["k"]);
    panel.siegelRadius =
      asNumber(panel.evidence["radius"]) ?? asNumber(panel.evidence["probe_radius"]);
  } catch (err) {
    panel.error = `classify failed: ${String(err)}`;
    return panel;
  }
  try {
    const resp = await fetchFn(`${base}/api/dynamics?${new URLSearchParams(common)}`);
    if (resp.status === 200) {
      panel.dynamics = decodeTile(await resp.arrayBuffer());
    } else {
      const body = (await resp.json()) as { detail?: string };
      setError(panel, body.detail ?? `dynamics failed: ${resp.status}`);
    }
  } catch (err) {
    setError(panel, `dynamics failed: ${String(err)}`);
  }
  if (overlays.rays) {
    try {
      const resp = await fetchFn(`${base}/api/rays?${new URLSearchParams(common)}`);
      if (resp.status === 200) {
        const body = (await resp.json()) as {
          rays?: { angle?: unknown; status?: unknown; points?: unknown[] }[];
        };
        panel.rays = (body.rays ?? []).map((r) => ({
          angle: String(r.angle ?? "?"),
          status: String(r.status ?? "?"),
          points: (r.points ?? [])
            .map(asComplex)
            .filter((p): p is Complex => p !== null),
        }));
      } else {
        const body = (await resp.json()) as { detail?: string };
        setError(panel, body.detail ?? `rays failed: ${resp.status}`);
      }
    } catch (err) {
      setError(panel, `rays failed: ${String(err)}`);
    }
  }
  if (overlays.petals) {
    try {
      const resp = await fetchFn(`${base}/api/petal?${new URLSearchParams(common)}`);
      if (resp.status === 200) {
        const body = (await resp.json()) as { repelling_vectors?: unknown[] };
        panel.petal = {
          repellingVectors: (body.repelling_vectors ?? [])
            .map(asComplex)
            .filter((p): p is Complex => p !== null),
        };
      } else {
        const body = (await resp.json()) as { detail?: string };
        setError(panel, body.detail ?? `petal failed: ${resp.status}`);
      }
    } catch (err) {
      setError(panel, `petal failed: ${String(err)}`);
    }
  }
  return panel;
}

export class InspectionHistory {
  readonly entries: InspectionPanel[] = [];
  private limit: number;

  constructor(limit = 20) {
    this.limit = limit;
  }

  push(panel: InspectionPanel): void {
    this.entries.push(panel);
    if (this.entries.length > this.limit) {
      this.entries.shift();
    }
  }
}
