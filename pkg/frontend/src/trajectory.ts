/**
 * Flow trajectory figure: the curvature story of one smoothing run.
 * From the long-format trajectory CSV (t, x, rho, phi, R, rm_min):
 * per recorded time, the minimum curvature-operator eigenvalue and
 * t * max|R| against log time.
 */

import { column, readCsv } from "./csv.js";
import { FigureSpec, hashesFor } from "./figspec.js";
import { Figure, PALETTE, extent, linearScale, logScale } from "./svg.js";

export function renderTrajectory(spec: FigureSpec): string {
  const table = readCsv(spec.inputs[0]);
  const t = column(table, "t");
  const R = column(table, "R");
  const rmMin = column(table, "rm_min");

  // group rows by recorded time
  const times: number[] = [];
  const minRm: number[] = [];
  const tMaxAbsR: number[] = [];
  let current = NaN;
  let mn = Infinity;
  let mx = 0;
  const flush = () => {
    if (!Number.isNaN(current) && current > 0) {
      times.push(current);
      minRm.push(mn);
      tMaxAbsR.push(current * mx);
    }
    mn = Infinity;
    mx = 0;
  };
  for (let i = 0; i < t.length; i++) {
    if (t[i] !== current) {
      flush();
      current = t[i];
    }
    mn = Math.min(mn, rmMin[i]);
    mx = Math.max(mx, Math.abs(R[i]));
  }
  flush();
  if (times.length < 2) throw new Error("trajectory has fewer than two recorded times");

  const fig = new Figure();
  const { x, y } = fig.innerRange;
  const xs = logScale([times[0], times[times.length - 1]], x);
  const ys = linearScale(extent([...minRm, ...tMaxAbsR, 0, 1]), y);
  fig.setMetadata({
    kind: "trajectory",
    source_meta: table.meta,
    config_hashes: hashesFor(spec),
  });
  fig.title(spec.title ?? "curvature along the smoothing flow");
  fig.axes(xs, ys, "t (log)", "min Rm, t max|R|", true);
  fig.polyline(times.map(xs), minRm.map(ys), PALETTE[0]);
  fig.polyline(times.map(xs), tMaxAbsR.map(ys), PALETTE[1]);
  // the curvature-lower-bound target of the smoothing theorem
  fig.polyline([xs(times[0]), xs(times[times.length - 1])], [ys(1), ys(1)],
    "#999", 1, "4 3");
  fig.legend([
    { label: "min Rm(t)", color: PALETTE[0] },
    { label: "t max|R|(t)", color: PALETTE[1] },
  ]);
  return fig.render();
}
