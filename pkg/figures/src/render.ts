/**
 * Shared renderer entry: argument handling, file IO and error mapping for
 * the three standalone scripts.
 *
 * Usage: `render_<kind> <in.csv> <out.png|out.svg>`.  On any input error
 * the process exits nonzero and no output file is written.
 */

import { readFileSync, writeFileSync, existsSync } from "node:fs";
import { CsvError } from "./csv.js";

export interface RenderResult {
  bytes: Buffer;
  format: "png" | "svg";
  /** Heat maps: the annotated peak, copied from the CSV maximum. */
  annotation?: { x: number; y: number; value: number };
}

export type Renderer = (text: string, format: "png" | "svg") => RenderResult;

export function runRenderer(name: string, render: Renderer, argv: string[]): number {
  if (argv.length !== 2) {
    process.stderr.write(`usage: ${name} <in.csv> <out.png|out.svg>\n`);
    return 2;
  }
  const [inPath, outPath] = argv;
  if (!existsSync(inPath)) {
    process.stderr.write(`${name}: input not found: ${inPath}\n`);
    return 1;
  }
  let result: RenderResult;
  try {
    const text = readFileSync(inPath, "utf-8");
    const format = outPath.toLowerCase().endsWith(".svg") ? "svg" : "png";
    result = render(text, format);
  } catch (err) {
    const msg = err instanceof CsvError ? err.message : String(err);
    process.stderr.write(`${name}: ${msg}\n`);
    return 1;
  }
  writeFileSync(outPath, result.bytes);
  let line = `${name}: wrote ${outPath} (${result.bytes.length} bytes)`;
  if (result.annotation) {
    line += `, peak value ${result.annotation.value} at (${result.annotation.x}, ${result.annotation.y})`;
  }
  process.stdout.write(line + "\n");
  return 0;
}
