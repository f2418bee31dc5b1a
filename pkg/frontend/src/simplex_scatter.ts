/**
 * Eigenvalue-simplex scatter for n = 4: points of Delta projected onto
 * the plane of the triangle spanned by the three vertex eigenvalue
 * vectors A = (1/4,1/4,1/4), B = (0,1/3,1/3), C = (0,0,1/2), with the
 * corners labeled A, B, C.  Inputs are eigenvalue JSONs
 * {n, lambdas, ...} produced by soliton runs.
 */

import { readJson } from "./csv.js";
import { FigureSpec, hashesFor } from "./figspec.js";
import { Figure, PALETTE } from "./svg.js";

export const VERTEX_A = [0.25, 0.25, 0.25];
export const VERTEX_B = [0.0, 1 / 3, 1 / 3];
export const VERTEX_C = [0.0, 0.0, 0.5];

/** Barycentric coordinates of a Delta point w.r.t. (A, B, C). */
export function barycentric(lam: number[]): [number, number, number] {
  // least squares on the 3x2 system lam - A = [B-A, C-A] (b, c)
  const d = lam.map((v, i) => v - VERTEX_A[i]);
  const u = VERTEX_B.map((v, i) => v - VERTEX_A[i]);
  const w = VERTEX_C.map((v, i) => v - VERTEX_A[i]);
  const uu = dot(u, u);
  const uw = dot(u, w);
  const ww = dot(w, w);
  const du = dot(d, u);
  const dw = dot(d, w);
  const det = uu * ww - uw * uw;
  const b = (ww * du - uw * dw) / det;
  const c = (uu * dw - uw * du) / det;
  return [1 - b - c, b, c];
}

function dot(a: number[], b: number[]): number {
  return a.reduce((s, v, i) => s + v * b[i], 0);
}

/** Triangle layout in figure coordinates (equilateral, A top). */
export function corners(fig: Figure): [number, number][] {
  const { x, y } = fig.innerRange;
  const cx = (x[0] + x[1]) / 2;
  const side = Math.min(x[1] - x[0], y[0] - y[1]) * 0.9;
  const hgt = (side * Math.sqrt(3)) / 2;
  const top = y[1] + (y[0] - y[1] - hgt) / 2;
  return [
    [cx, top], // A
    [cx - side / 2, top + hgt], // B
    [cx + side / 2, top + hgt], // C
  ];
}

export function project(lam: number[], tri: [number, number][]): [number, number] {
  const [a, b, c] = barycentric(lam);
  return [
    a * tri[0][0] + b * tri[1][0] + c * tri[2][0],
    a * tri[0][1] + b * tri[1][1] + c * tri[2][1],
  ];
}

export function renderSimplexScatter(spec: FigureSpec): string {
  const points: { lam: number[]; label: string }[] = [];
  for (const input of spec.inputs) {
    const payload = readJson(input);
    if (payload["n"] !== 4) {
      throw new Error(`simplex scatter is the n=4 projection, got n=${payload["n"]}`);
    }
    const lam = payload["lambdas"] as number[];
    points.push({ lam, label: input.replace(/^.*\//, "") });
  }

  const fig = new Figure(560, 520);
  fig.setMetadata({
    kind: "simplex_scatter",
    config_hashes: hashesFor(spec),
    points: points.map((p) => p.lam),
  });
  fig.title(spec.title ?? "tip Ricci eigenvalues in the simplex (n=4)");
  const tri = corners(fig);
  fig.line(...tri[0], ...tri[1], "#444", 1.2);
  fig.line(...tri[1], ...tri[2], "#444", 1.2);
  fig.line(...tri[2], ...tri[0], "#444", 1.2);
  const labels = ["A", "B", "C"];
  const offsets: [number, number][] = [[0, -10], [-12, 14], [12, 14]];
  tri.forEach(([px, py], i) => {
    fig.text(px + offsets[i][0], py + offsets[i][1], labels[i], 14);
  });

  points.forEach((p, i) => {
    const [px, py] = project(p.lam, tri);
    fig.circle(px, py, 5, PALETTE[i % PALETTE.length]);
  });
  return fig.render();
}
