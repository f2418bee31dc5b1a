/**
 * DeTurck stability figure: sup-norm histories |h(t)| for one or more
 * runs (CSV columns t, sup_h), normalized by their initial size so the
 * linear-regime collapse is visible.
 */

import { basename } from "node:path";

import { column, readCsv } from "./csv.js";
import { FigureSpec, hashesFor } from "./figspec.js";
import { Figure, PALETTE, extent, linearScale } from "./svg.js";

export function renderStability(spec: FigureSpec): string {
  const series = spec.inputs.map((input) => {
    const table = readCsv(input);
    return {
      name: basename(input, ".csv"),
      t: column(table, "t"),
      h: column(table, "sup_h"),
    };
  });

  const fig = new Figure();
  const { x, y } = fig.innerRange;
  const allT = series.flatMap((s) => s.t);
  const ratios = series.flatMap((s) => s.h.map((v) => v / (s.h[0] || 1)));
  const xs = linearScale(extent(allT), x);
  const ys = linearScale(extent([...ratios, 0]), y);
  fig.setMetadata({
    kind: "stability",
    config_hashes: hashesFor(spec),
  });
  fig.title(spec.title ?? "Ricci-DeTurck stability: |h(t)| / |h(0)|");
  fig.axes(xs, ys, "t", "|h(t)| / |h(0)|");
  series.forEach((s, i) => {
    const norm = s.h[0] || 1;
    fig.polyline(s.t.map(xs), s.h.map((v) => ys(v / norm)), PALETTE[i % PALETTE.length]);
  });
  fig.legend(series.map((s, i) => ({ label: s.name, color: PALETTE[i % PALETTE.length] })));
  return fig.render();
}
