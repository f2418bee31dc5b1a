/**
 * Minimal SVG figure builder: linear/log axes, polylines, scatter marks,
 * labels, and a metadata block carrying the source config hashes.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const DEFAULT_MARGIN: Margin = { top: 34, right: 16, bottom: 42, left: 58 };

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const lo = Math.log10(Math.max(domain[0], 1e-300));
  const hi = Math.log10(Math.max(domain[1], 1e-300));
  const base = linearScale([lo, hi], range);
  const f = ((v: number) => base(Math.log10(Math.max(v, 1e-300)))) as Scale;
  f.domain = domain;
  return f;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!Number.isFinite(lo)) throw new Error("no finite values for axis extent");
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

export function ticks(domain: [number, number], count = 5): number[] {
  const span = domain[1] - domain[0];
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (count * step) / span;
  const mult = err <= 0.15 ? 10 : err <= 0.35 ? 5 : err <= 0.75 ? 2 : 1;
  const s = step * mult;
  const start = Math.ceil(domain[0] / s) * s;
  const out: number[] = [];
  for (let v = start; v <= domain[1] + 1e-12 * span; v += s) out.push(v);
  return out;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return parseFloat(v.toPrecision(4)).toString();
}

export const PALETTE = ["#20639b", "#ed553b", "#3caea3", "#f6d55c", "#173f5f"];

export class Figure {
  readonly width: number;
  readonly height: number;
  readonly margin: Margin;
  private body: string[] = [];
  private metadata: Record<string, unknown> = {};

  constructor(width = 640, height = 420, margin: Margin = DEFAULT_MARGIN) {
    this.width = width;
    this.height = height;
    this.margin = margin;
  }

  get innerRange(): { x: [number, number]; y: [number, number] } {
    return {
      x: [this.margin.left, this.width - this.margin.right],
      y: [this.height - this.margin.bottom, this.margin.top],
    };
  }

  setMetadata(meta: Record<string, unknown>): void {
    this.metadata = meta;
  }

  title(text: string): void {
    this.body.push(
      `<text x="${this.width / 2}" y="20" text-anchor="middle" ` +
        `font-size="15" font-family="sans-serif">${escapeXml(text)}</text>`,
    );
  }

  axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string, logX = false): void {
    const { x, y } = this.innerRange;
    this.body.push(
      `<rect x="${x[0]}" y="${y[1]}" width="${x[1] - x[0]}" height="${y[0] - y[1]}" ` +
        `fill="none" stroke="#444" stroke-width="1"/>`,
    );
    const xt = logX ? logTicks(xs.domain) : ticks(xs.domain);
    for (const v of xt) {
      const px = xs(v);
      if (px < x[0] - 0.5 || px > x[1] + 0.5) continue;
      this.body.push(
        `<line x1="${px}" y1="${y[0]}" x2="${px}" y2="${y[0] + 5}" stroke="#444"/>`,
        `<text x="${px}" y="${y[0] + 18}" text-anchor="middle" font-size="11" ` +
          `font-family="sans-serif">${fmt(v)}</text>`,
      );
    }
    for (const v of ticks(ys.domain)) {
      const py = ys(v);
      if (py > y[0] + 0.5 || py < y[1] - 0.5) continue;
      this.body.push(
        `<line x1="${x[0] - 5}" y1="${py}" x2="${x[0]}" y2="${py}" stroke="#444"/>`,
        `<text x="${x[0] - 8}" y="${py + 4}" text-anchor="end" font-size="11" ` +
          `font-family="sans-serif">${fmt(v)}</text>`,
      );
    }
    this.body.push(
      `<text x="${(x[0] + x[1]) / 2}" y="${this.height - 6}" text-anchor="middle" ` +
        `font-size="12" font-family="sans-serif">${escapeXml(xLabel)}</text>`,
      `<text x="14" y="${(y[0] + y[1]) / 2}" text-anchor="middle" font-size="12" ` +
        `font-family="sans-serif" transform="rotate(-90 14 ${(y[0] + y[1]) / 2})">` +
        `${escapeXml(yLabel)}</text>`,
    );
  }

  polyline(px: number[], py: number[], color: string, width = 1.6, dash = ""): void {
    const pts = px
      .map((v, i) => `${v.toFixed(2)},${py[i].toFixed(2)}`)
      .join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.body.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" ` +
        `stroke-width="${width}"${dashAttr}/>`,
    );
  }

  circle(cx: number, cy: number, r: number, color: string): void {
    this.body.push(
      `<circle cx="${cx.toFixed(2)}" cy="${cy.toFixed(2)}" r="${r}" fill="${color}"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, color: string, width = 1): void {
    this.body.push(
      `<line x1="${x1.toFixed(2)}" y1="${y1.toFixed(2)}" x2="${x2.toFixed(2)}" ` +
        `y2="${y2.toFixed(2)}" stroke="${color}" stroke-width="${width}"/>`,
    );
  }

  text(x: number, y: number, content: string, size = 12, anchor = "middle"): void {
    this.body.push(
      `<text x="${x.toFixed(2)}" y="${y.toFixed(2)}" text-anchor="${anchor}" ` +
        `font-size="${size}" font-family="sans-serif">${escapeXml(content)}</text>`,
    );
  }

  legend(entries: { label: string; color: string }[]): void {
    const { x, y } = this.innerRange;
    entries.forEach((e, i) => {
      const py = y[1] + 16 + 16 * i;
      this.line(x[1] - 110, py - 4, x[1] - 88, py - 4, e.color, 2);
      this.text(x[1] - 82, py, e.label, 11, "start");
    });
  }

  render(): string {
    const metaJson = escapeXml(JSON.stringify(this.metadata));
    const hash = (this.metadata as { config_hashes?: unknown }).config_hashes;
    const hashAttr = escapeXml(JSON.stringify(hash ?? "unknown"));
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" ` +
      `data-config-hashes=${quoteAttr(hashAttr)}>\n` +
      `<metadata>${metaJson}</metadata>\n` +
      `<rect width="100%" height="100%" fill="white"/>\n` +
      this.body.join("\n") +
      `\n</svg>\n`
    );
  }
}

function logTicks(domain: [number, number]): number[] {
  const lo = Math.ceil(Math.log10(Math.max(domain[0], 1e-300)));
  const hi = Math.floor(Math.log10(Math.max(domain[1], 1e-300)));
  const out: number[] = [];
  for (let e = lo; e <= hi; e++) out.push(Math.pow(10, e));
  return out;
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function quoteAttr(s: string): string {
  return `"${s}"`;
}
