import { existsSync, mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import { ArtifactError, parseCsv, readCsv, column, configHashFor } from "../src/csv.js";
import { FigureSpec, loadSpec } from "../src/figspec.js";
import { renderProfile } from "../src/profile.js";
import { renderTrajectory } from "../src/trajectory.js";
import {
  VERTEX_A,
  VERTEX_B,
  VERTEX_C,
  barycentric,
  corners,
  project,
  renderSimplexScatter,
} from "../src/simplex_scatter.js";
import { renderStability } from "../src/stability.js";
import { Figure } from "../src/svg.js";

const FIXTURES = join(__dirname, "..", "fixtures");
const OUT = join(__dirname, "..", "dist-test");

beforeAll(() => {
  mkdirSync(OUT, { recursive: true });
});

function spec(kind: FigureSpec["kind"], inputs: string[], output: string): FigureSpec {
  return { kind, inputs: inputs.map((f) => join(FIXTURES, f)), output: join(OUT, output) };
}

describe("csv parsing", () => {
  it("parses metadata header and columns", () => {
    const table = parseCsv('# {"n": 4}\na,b\n1,2\n3,4\n');
    expect(table.meta).toEqual({ n: 4 });
    expect(column(table, "b")).toEqual([2, 4]);
  });

  it("rejects empty and malformed files", () => {
    expect(() => parseCsv("")).toThrow(ArtifactError);
    expect(() => parseCsv("a,b\n1\n")).toThrow(ArtifactError);
    expect(() => column(parseCsv("a\n1\n"), "zzz")).toThrow(/missing column/);
  });

  it("reads fixture summaries for config hashes", () => {
    const hash = configHashFor(join(FIXTURES, "bry4.csv"));
    expect(hash).toMatch(/^[0-9a-f]{16}$/);
  });
});

describe("simplex projection math", () => {
  it("vertex eigenvalue vectors are barycentric unit vectors", () => {
    expect(barycentric(VERTEX_A)[0]).toBeCloseTo(1, 12);
    expect(barycentric(VERTEX_B)[1]).toBeCloseTo(1, 12);
    expect(barycentric(VERTEX_C)[2]).toBeCloseTo(1, 12);
  });

  it("projects vertices onto the triangle corners", () => {
    const fig = new Figure(560, 520);
    const tri = corners(fig);
    const verts = [VERTEX_A, VERTEX_B, VERTEX_C];
    verts.forEach((v, i) => {
      const [px, py] = project(v, tri);
      expect(px).toBeCloseTo(tri[i][0], 8);
      expect(py).toBeCloseTo(tri[i][1], 8);
    });
  });
});

describe("figure rendering from acceptance artifacts", () => {
  it("profile renders and embeds the config hash", () => {
    const s = spec("profile", ["bry4.csv"], "profile.svg");
    const svg = renderProfile(s);
    writeFileSync(s.output, svg);
    const hash = configHashFor(join(FIXTURES, "bry4.csv"));
    expect(svg).toContain("<svg");
    expect(svg).toContain(hash);
    expect(svg).toContain("polyline");
  });

  it("trajectory renders with the Rm >= 1 reference line", () => {
    const s = spec("trajectory", ["smoothing.csv"], "trajectory.svg");
    const svg = renderTrajectory(s);
    writeFileSync(s.output, svg);
    expect(svg).toContain(configHashFor(join(FIXTURES, "smoothing.csv")));
    expect(svg.match(/polyline/g)!.length).toBeGreaterThanOrEqual(3);
  });

  it("simplex scatter places the three vertex points at the corners", () => {
    const s = spec(
      "simplex_scatter",
      ["vertex_k0_eigs.json", "vertex_k1_eigs.json", "vertex_k2_eigs.json"],
      "simplex.svg",
    );
    const svg = renderSimplexScatter(s);
    writeFileSync(s.output, svg);
    const fig = new Figure(560, 520);
    const tri = corners(fig);
    for (const [cx, cy] of tri) {
      const pattern = new RegExp(
        `<circle cx="${cx.toFixed(2)}" cy="${cy.toFixed(2)}"`,
      );
      expect(svg).toMatch(pattern);
    }
    for (const label of ["A", "B", "C"]) {
      expect(svg).toContain(`>${label}</text>`);
    }
  });

  it("stability renders both epsilon histories", () => {
    const s = spec(
      "stability",
      ["stability_e2.csv", "stability_e3.csv"],
      "stability.svg",
    );
    const svg = renderStability(s);
    writeFileSync(s.output, svg);
    expect(svg).toContain(configHashFor(join(FIXTURES, "stability_e2.csv")));
    expect(svg.match(/polyline/g)!.length).toBeGreaterThanOrEqual(2);
  });

  it("is deterministic", () => {
    const s = spec("profile", ["bry4.csv"], "profile2.svg");
    expect(renderProfile(s)).toEqual(renderProfile(s));
  });
});

describe("figure spec guards", () => {
  it("rejects missing inputs", () => {
    const bad = join(OUT, "missing-spec.json");
    writeFileSync(
      bad,
      JSON.stringify({
        kind: "profile",
        inputs: [join(FIXTURES, "nope.csv")],
        output: join(OUT, "x.svg"),
      }),
    );
    expect(() => loadSpec(bad, "profile")).toThrow(/missing input/);
  });

  it("rejects kind mismatches and empty CSVs without writing output", () => {
    const emptyCsv = join(OUT, "empty.csv");
    writeFileSync(emptyCsv, "");
    const s: FigureSpec = {
      kind: "profile",
      inputs: [emptyCsv],
      output: join(OUT, "should-not-exist.svg"),
    };
    expect(() => renderProfile(s)).toThrow(ArtifactError);
    expect(existsSync(s.output)).toBe(false);

    const specPath = join(OUT, "wrong-kind.json");
    writeFileSync(
      specPath,
      JSON.stringify({ kind: "stability", inputs: [emptyCsv], output: "x.svg" }),
    );
    expect(() => loadSpec(specPath, "profile")).toThrow(/does not match/);
  });
});
