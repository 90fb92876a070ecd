/**
 * Strict CSV reader for the xpmbounds output contracts.
 *
 * Each figure kind expects an exact header; anything else is a hard error
 * naming the expected and found columns, so a mismatched file can never be
 * rendered as the wrong figure.
 */

export interface Table {
  columns: string[];
  /** One row per line, numeric, same length as columns. */
  rows: number[][];
}

export class CsvError extends Error {}

export interface ParseOptions {
  /** Column indices where NaN cells are legitimate (failed sweep cells). */
  nanColumns?: number[];
}

export function parseCsv(
  text: string,
  expectedHeader: string[],
  opts: ParseOptions = {},
): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0 && !l.startsWith("#"));
  if (lines.length === 0) {
    throw new CsvError("empty CSV: no header line found");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  if (
    columns.length !== expectedHeader.length ||
    columns.some((c, i) => c !== expectedHeader[i])
  ) {
    throw new CsvError(
      `header mismatch: expected "${expectedHeader.join(",")}", found "${columns.join(",")}"`,
    );
  }
  if (lines.length === 1) {
    throw new CsvError("empty CSV: header but no data rows");
  }
  const nanOk = new Set(opts.nanColumns ?? []);
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new CsvError(
        `row ${i + 1}: expected ${columns.length} fields, found ${parts.length}`,
      );
    }
    const row = parts.map((p) => Number(p));
    const bad = row.findIndex(
      (v, j) => !Number.isFinite(v) && !(Number.isNaN(v) && nanOk.has(j)),
    );
    if (bad >= 0) {
      throw new CsvError(`row ${i + 1}: non-numeric value "${parts[bad]}"`);
    }
    rows.push(row);
  }
  return { columns, rows };
}

/** Distinct values in first-appearance order (axis reconstruction). */
export function distinct(values: number[]): number[] {
  const seen = new Set<number>();
  const out: number[] = [];
  for (const v of values) {
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}
