import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { InspectionHistory, inspectPoint, type JsonFetch } from "../src/inspect.js";

const CLASSIFY_ORIGIN = JSON.parse(
  readFileSync(new URL("../fixtures/classify_origin.json", import.meta.url), "utf8"),
);
const CLASSIFY_ESCAPE = JSON.parse(
  readFileSync(new URL("../fixtures/classify_escape.json", import.meta.url), "utf8"),
);
const CLASSIFY_COMPONENT = JSON.parse(
  readFileSync(
    new URL("../fixtures/classify_component.json", import.meta.url),
    "utf8",
  ),
);
const DYNAMICS = new Uint8Array(
  readFileSync(new URL("../fixtures/dynamics_origin.cubq", import.meta.url)),
);
const RAYS = JSON.parse(
  readFileSync(new URL("../fixtures/rays_escaping.json", import.meta.url), "utf8"),
);

interface StubBodies {
  classify: unknown;
  dynamics?: Uint8Array;
  rays?: unknown;
  petal?: unknown;
}

function serviceStub(bodies: StubBodies, hits?: string[]): JsonFetch {
  const json = (body: unknown) => ({
    status: 200,
    json: async () => body,
    arrayBuffer: async () => new ArrayBuffer(0),
  });
  return async (url: string) => {
    hits?.push(url);
    if (url.includes("/api/classify")) {
      return json(bodies.classify);
    }
    if (url.includes("/api/dynamics") && bodies.dynamics) {
      const bytes = bodies.dynamics;
      return {
        status: 200,
        json: async () => ({}),
        arrayBuffer: async () =>
          bytes.buffer.slice(bytes.byteOffset, bytes.byteOffset + bytes.byteLength),
      };
    }
    if (url.includes("/api/rays") && bodies.rays !== undefined) {
      return json(bodies.rays);
    }
    if (url.includes("/api/petal") && bodies.petal !== undefined) {
      return json(bodies.petal);
    }
    return {
      status: 500,
      json: async () => ({ detail: "unexpected url" }),
      arrayBuffer: async () => new ArrayBuffer(0),
    };
  };
}

describe("inspectPoint", () => {
  it("reports InPHD at the origin of the zero-multiplier slice", async () => {
    const panel = await inspectPoint(
      serviceStub({ classify: CLASSIFY_ORIGIN, dynamics: DYNAMICS }),
      "",
      { re: 0, im: 0 },
      { re: 0, im: 0 },
    );
    expect(panel.verdict).toBe("InPHD");
    expect(panel.error).toBeNull();
    expect(panel.evidence["criticals_in_immediate"]).toBe(2);
    expect(panel.dynamics).not.toBeNull();
    expect(panel.dynamics!.nx).toBe(32);
  });

  it("reports the escape verdict with its evidence outside the locus", async () => {
    const panel = await inspectPoint(
      serviceStub({ classify: CLASSIFY_ESCAPE, dynamics: DYNAMICS }),
      "",
      { re: 0, im: 0 },
      { re: 3, im: 0 },
    );
    expect(panel.verdict).toBe("NotInM3");
    expect(Array.isArray(panel.evidence["steps"])).toBe(true);
  });

  it("matches the recorded component verdict for a click inside it", async () => {
    // fixture holds the service's answer at the deepest pixel of the largest
    // hull component on the golden-mean slice, captured alongside the
    // component report it must agree with
    const [lre, lim] = CLASSIFY_COMPONENT.lambda as [number, number];
    const [bre, bim] = CLASSIFY_COMPONENT.b as [number, number];
    const panel = await inspectPoint(
      serviceStub({ classify: CLASSIFY_COMPONENT.response }),
      "",
      { re: lre, im: lim },
      { re: bre, im: bim },
    );
    expect(panel.verdict).toBe(CLASSIFY_COMPONENT.component_verdict);
    expect(panel.verdict).toBe("SiegelCapture");
    expect(panel.captureTime).not.toBeNull();
    expect(panel.siegelRadius).not.toBeNull();
  });

  it("extracts capture time and probe radius when present", async () => {
    const body = { tag: "SiegelCapture", evidence: { k: 18, radius: 0.4074 } };
    const panel = await inspectPoint(
      serviceStub({ classify: body }),
      "",
      { re: -0.737, im: 0.675 },
      { re: 0.1, im: 0 },
    );
    expect(panel.captureTime).toBe(18);
    expect(panel.siegelRadius).toBeCloseTo(0.4074, 10);
  });

  it("renders endpoint errors inline instead of throwing", async () => {
    const failing: JsonFetch = async () => ({
      status: 400,
      json: async () => ({ detail: "multiplier outside closed unit disk" }),
      arrayBuffer: async () => new ArrayBuffer(0),
    });
    const panel = await inspectPoint(failing, "", { re: 2, im: 0 }, { re: 0, im: 0 });
    expect(panel.verdict).toBeNull();
    expect(panel.error).toBe("multiplier outside closed unit disk");
  });

  it("keeps the classify verdict when only dynamics fails", async () => {
    const panel = await inspectPoint(
      serviceStub({ classify: CLASSIFY_ORIGIN }),
      "",
      { re: 0, im: 0 },
      { re: 0, im: 0 },
    );
    expect(panel.verdict).toBe("InPHD");
    expect(panel.dynamics).toBeNull();
    expect(panel.error).toMatch(/unexpected url/);
  });
});

describe("inspectPoint overlays", () => {
  it("parses the recorded ray polylines when the overlay is on", async () => {
    const panel = await inspectPoint(
      serviceStub({ classify: CLASSIFY_ORIGIN, dynamics: DYNAMICS, rays: RAYS }),
      "",
      { re: 0.6, im: 0 },
      { re: 2, im: 0.7 },
      { petals: false, rays: true },
    );
    expect(panel.error).toBeNull();
    expect(panel.rays).not.toBeNull();
    expect(panel.rays!.length).toBe(8);
    for (const ray of panel.rays!) {
      expect(typeof ray.angle).toBe("string");
      expect(ray.points.length).toBeGreaterThan(1);
      expect(Number.isFinite(ray.points[0]!.re)).toBe(true);
    }
  });

  it("parses repelling directions for the petal overlay", async () => {
    const petalBody = {
      spec: { q: 1, m: 2 },
      repelling_vectors: [[1, 0], [-0.5, 0.8660254037844386]],
    };
    const panel = await inspectPoint(
      serviceStub({ classify: CLASSIFY_ORIGIN, dynamics: DYNAMICS, petal: petalBody }),
      "",
      { re: 1, im: 0 },
      { re: 0, im: 0 },
      { petals: true, rays: false },
    );
    expect(panel.petal).toEqual({
      repellingVectors: [
        { re: 1, im: 0 },
        { re: -0.5, im: 0.8660254037844386 },
      ],
    });
  });

  it("does not touch overlay endpoints unless asked", async () => {
    const hits: string[] = [];
    await inspectPoint(
      serviceStub({ classify: CLASSIFY_ORIGIN, dynamics: DYNAMICS }, hits),
      "",
      { re: 0, im: 0 },
      { re: 0, im: 0 },
    );
    expect(hits.some((u) => u.includes("/api/rays"))).toBe(false);
    expect(hits.some((u) => u.includes("/api/petal"))).toBe(false);
    expect(hits.some((u) => u.includes("/api/classify"))).toBe(true);
  });

  it("keeps the verdict when an overlay endpoint fails", async () => {
    const panel = await inspectPoint(
      serviceStub({ classify: CLASSIFY_ORIGIN, dynamics: DYNAMICS }),
      "",
      { re: 0, im: 0 },
      { re: 0, im: 0 },
      { petals: false, rays: true },
    );
    expect(panel.verdict).toBe("InPHD");
    expect(panel.rays).toBeNull();
    expect(panel.error).toMatch(/unexpected url/);
  });
});

describe("InspectionHistory", () => {
  it("keeps the most recent entries up to the limit", async () => {
    const history = new InspectionHistory(3);
    for (let i = 0; i < 5; i++) {
      const panel = await inspectPoint(
        serviceStub({ classify: { tag: `T${i}`, evidence: {} } }),
        "",
        { re: 0, im: 0 },
        { re: i, im: 0 },
      );
      history.push(panel);
    }
    expect(history.entries.map((p) => p.verdict)).toEqual(["T2", "T3", "T4"]);
  });
});
