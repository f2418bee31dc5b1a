/**
 * Parser for ricci-lab CSV artifacts: an optional leading `# {json}`
 * metadata line, a mandatory header row, '.' decimals, '\n' endings.
 */

import { readFileSync, existsSync } from "node:fs";

export interface Table {
  meta: Record<string, unknown>;
  columns: string[];
  rows: number[][];
}

export class ArtifactError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) throw new ArtifactError("empty CSV");
  let meta: Record<string, unknown> = {};
  let start = 0;
  if (lines[0].startsWith("# ")) {
    meta = JSON.parse(lines[0].slice(2));
    start = 1;
  }
  if (start >= lines.length) throw new ArtifactError("CSV has no header row");
  const columns = lines[start].split(",");
  const rows: number[][] = [];
  for (const line of lines.slice(start + 1)) {
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new ArtifactError(
        `row width ${parts.length} does not match header ${columns.length}`,
      );
    }
    rows.push(parts.map(Number));
  }
  if (rows.length === 0) throw new ArtifactError("CSV has no data rows");
  return { meta, columns, rows };
}

export function readCsv(path: string): Table {
  if (!existsSync(path)) throw new ArtifactError(`missing artifact: ${path}`);
  return parseCsv(readFileSync(path, "utf8"));
}

export function column(table: Table, name: string): number[] {
  const i = table.columns.indexOf(name);
  if (i < 0) throw new ArtifactError(`missing column '${name}' (have ${table.columns})`);
  return table.rows.map((r) => r[i]);
}

/** Config hash from the run summary written next to every artifact. */
export function configHashFor(artifactPath: string): string {
  const summaryPath = `${artifactPath}.summary.json`;
  if (!existsSync(summaryPath)) return "unknown";
  const summary = JSON.parse(readFileSync(summaryPath, "utf8"));
  return typeof summary.config_hash === "string" ? summary.config_hash : "unknown";
}

export function readJson(path: string): Record<string, unknown> {
  if (!existsSync(path)) throw new ArtifactError(`missing artifact: ${path}`);
  return JSON.parse(readFileSync(path, "utf8"));
}
