/**
 * Soliton profile figure: warping phi(r) and scalar curvature R(r)
 * from a profile CSV (columns r, phi_1, f, R, ...).
 */

import { column, readCsv } from "./csv.js";
import { FigureSpec, hashesFor } from "./figspec.js";
import { Figure, PALETTE, extent, linearScale } from "./svg.js";

export function renderProfile(spec: FigureSpec): string {
  const table = readCsv(spec.inputs[0]);
  const r = column(table, "r");
  const phi = column(table, "phi_1");
  const R = column(table, "R");

  const fig = new Figure();
  const { x, y } = fig.innerRange;
  const xs = linearScale(extent(r), x);
  const ys = linearScale(extent([...phi, ...R, 0]), y);
  fig.setMetadata({
    kind: "profile",
    source_meta: table.meta,
    config_hashes: hashesFor(spec),
  });
  fig.title(spec.title ?? `soliton profile (${table.meta["kind"] ?? "steady"}, n=${table.meta["n"]})`);
  fig.axes(xs, ys, "r", "phi, R");
  fig.polyline(r.map(xs), phi.map(ys), PALETTE[0]);
  fig.polyline(r.map(xs), R.map(ys), PALETTE[1]);
  fig.legend([
    { label: "phi(r)", color: PALETTE[0] },
    { label: "R(r)", color: PALETTE[1] },
  ]);
  return fig.render();
}
