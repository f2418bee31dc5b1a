/**
 * FigureSpec: the JSON contract each render script takes as its only
 * argument.  Inputs must exist; the rendered SVG embeds the config hash
 * of every input's run summary.
 */

import { existsSync, readFileSync, writeFileSync } from "node:fs";

import { ArtifactError, configHashFor } from "./csv.js";

export type FigureKind = "profile" | "trajectory" | "simplex_scatter" | "stability";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  title?: string;
}

export function loadSpec(path: string, expected: FigureKind): FigureSpec {
  if (!existsSync(path)) throw new ArtifactError(`figure spec not found: ${path}`);
  const raw = JSON.parse(readFileSync(path, "utf8"));
  if (raw.kind !== expected) {
    throw new ArtifactError(`spec kind '${raw.kind}' does not match '${expected}'`);
  }
  if (!Array.isArray(raw.inputs) || raw.inputs.length === 0) {
    throw new ArtifactError("spec needs a non-empty inputs list");
  }
  for (const input of raw.inputs) {
    if (!existsSync(input)) throw new ArtifactError(`missing input: ${input}`);
  }
  if (typeof raw.output !== "string" || raw.output.length === 0) {
    throw new ArtifactError("spec needs an output path");
  }
  return raw as FigureSpec;
}

export function hashesFor(spec: FigureSpec): Record<string, string> {
  const out: Record<string, string> = {};
  for (const input of spec.inputs) {
    const base = input.replace(/_eigs\.json$|_stability\.json$/, ".csv");
    out[input] = configHashFor(existsSync(`${input}.summary.json`) ? input : base);
  }
  return out;
}

export function writeFigure(spec: FigureSpec, svg: string): void {
  writeFileSync(spec.output, svg);
}

/** Entry-point wrapper shared by the render scripts. */
export function runScript(
  kind: FigureKind,
  render: (spec: FigureSpec) => string,
): void {
  const specPath = process.argv[2];
  if (!specPath) {
    console.error(`usage: render_${kind} <figure-spec.json>`);
    process.exit(2);
  }
  try {
    const spec = loadSpec(specPath, kind);
    writeFigure(spec, render(spec));
    console.log(spec.output);
  } catch (err) {
    console.error(`${kind}: ${(err as Error).message}`);
    process.exit(1);
  }
}
