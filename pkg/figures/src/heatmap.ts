/**
 * Heat-map figure: the F1 bound over the (phi, walk-off) grid.
 *
 * The peak annotation is the CSV maximum, copied verbatim from the parsed
 * rows (never recomputed), with deterministic row-major tie-breaking to
 * match the producer.
 */

import { distinct, parseCsv, CsvError } from "./csv.js";
import { BLACK, GREY, MARGINS, Svg, fmt, viridis } from "./plot.js";
import { Raster } from "./raster.js";
import type { RenderResult } from "./render.js";

export const HEATMAP_HEADER = ["phi_rad", "walkoff_fs", "f1max"];

export function renderHeatmap(
  text: string,
  format: "png" | "svg",
  width = 720,
  height = 560,
): RenderResult {
  const table = parseCsv(text, HEATMAP_HEADER, { nanColumns: [2] });
  const phis = distinct(table.rows.map((r) => r[0]));
  const walks = distinct(table.rows.map((r) => r[1]));
  if (table.rows.length !== phis.length * walks.length) {
    throw new CsvError(
      `not a full grid: ${table.rows.length} rows for ` +
        `${phis.length} x ${walks.length} axis values`,
    );
  }
  const iPhi = new Map(phis.map((v, i) => [v, i]));
  const iWalk = new Map(walks.map((v, i) => [v, i]));
  const cells: number[][] = phis.map(() => walks.map(() => NaN));
  let peak: { x: number; y: number; value: number } | undefined;
  for (const [phi, walk, v] of table.rows) {
    cells[iPhi.get(phi)!][iWalk.get(walk)!] = v;
    if (Number.isFinite(v) && (peak === undefined || v > peak.value)) {
      peak = { x: phi, y: walk, value: v };
    }
  }
  if (peak === undefined) {
    throw new CsvError("all cells are NaN; nothing to render");
  }
  const finite = table.rows.map((r) => r[2]).filter(Number.isFinite);
  const vLo = Math.min(...finite);
  const vHi = Math.max(...finite);
  const span = vHi > vLo ? vHi - vLo : 1.0;

  const x0 = MARGINS.left;
  const x1 = width - MARGINS.right;
  const y0 = height - MARGINS.bottom;
  const y1 = MARGINS.top;
  const cellW = (x1 - x0) / phis.length;
  const cellH = (y0 - y1) / walks.length;
  const annotation =
    `peak f1max=${fmt(peak.value)} at phi=${fmt(peak.x)}, ` +
    `walkoff=${fmt(peak.y)} fs`;
  const title = "f1 bound vs phi and walk-off";

  // cells are positioned by grid index; tick labels carry the axis values
  const xTickIdx = tickIndices(phis.length);
  const yTickIdx = tickIndices(walks.length);

  if (format === "svg") {
    const svg = new Svg(width, height);
    for (let i = 0; i < phis.length; i++) {
      for (let j = 0; j < walks.length; j++) {
        const v = cells[i][j];
        const color = Number.isFinite(v) ? viridis((v - vLo) / span) : GREY;
        svg.rect(x0 + i * cellW, y0 - (j + 1) * cellH, cellW + 0.5, cellH + 0.5, color);
      }
    }
    svg.line(x0, y0, x1, y0, BLACK);
    svg.line(x0, y0, x0, y1, BLACK);
    for (const i of xTickIdx) {
      const x = x0 + (i + 0.5) * cellW;
      svg.line(x, y0, x, y0 + 4, BLACK);
      svg.text(x, y0 + 16, fmt(phis[i]), BLACK, "middle");
    }
    for (const j of yTickIdx) {
      const y = y0 - (j + 0.5) * cellH;
      svg.line(x0 - 4, y, x0, y, BLACK);
      svg.text(x0 - 6, y + 4, fmt(walks[j]), BLACK, "end");
    }
    svg.text((x0 + x1) / 2, y0 + 32, "phi_rad", BLACK, "middle");
    svg.text(6, MARGINS.top - 10, "walkoff_fs", BLACK);
    svg.text((x0 + x1) / 2, 16, title, BLACK, "middle");
    const px = x0 + (iPhi.get(peak.x)! + 0.5) * cellW;
    const py = y0 - (iWalk.get(peak.y)! + 0.5) * cellH;
    svg.line(px - 6, py, px + 6, py, BLACK);
    svg.line(px, py - 6, px, py + 6, BLACK);
    svg.text((x0 + x1) / 2, y1 - 6, annotation, BLACK, "middle");
    return { bytes: Buffer.from(svg.toString(), "utf-8"), format, annotation: peak };
  }

  const img = new Raster(width, height);
  for (let i = 0; i < phis.length; i++) {
    for (let j = 0; j < walks.length; j++) {
      const v = cells[i][j];
      const color = Number.isFinite(v) ? viridis((v - vLo) / span) : GREY;
      img.fillRect(
        x0 + i * cellW,
        y0 - (j + 1) * cellH,
        x0 + (i + 1) * cellW,
        y0 - j * cellH,
        color,
      );
    }
  }
  img.line(x0, y0, x1, y0, BLACK);
  img.line(x0, y0, x0, y1, BLACK);
  for (const i of xTickIdx) {
    const x = x0 + (i + 0.5) * cellW;
    img.line(x, y0, x, y0 + 4, BLACK);
    const label = fmt(phis[i]);
    img.text(x - img.textWidth(label) / 2, y0 + 8, label, BLACK);
  }
  for (const j of yTickIdx) {
    const y = y0 - (j + 0.5) * cellH;
    img.line(x0 - 4, y, x0, y, BLACK);
    const label = fmt(walks[j]);
    img.text(x0 - 6 - img.textWidth(label), y - 3, label, BLACK);
  }
  img.text((x0 + x1) / 2 - img.textWidth("phi_rad") / 2, y0 + 24, "phi_rad", BLACK);
  img.text(6, MARGINS.top - 16, "walkoff_fs", BLACK);
  img.text((x0 + x1) / 2 - img.textWidth(title) / 2, 10, title, BLACK);
  const px = x0 + (iPhi.get(peak.x)! + 0.5) * cellW;
  const py = y0 - (iWalk.get(peak.y)! + 0.5) * cellH;
  img.line(px - 6, py, px + 6, py, BLACK);
  img.line(px, py - 6, px, py + 6, BLACK);
  img.text(
    (x0 + x1) / 2 - img.textWidth(annotation) / 2,
    y1 - 12,
    annotation,
    BLACK,
  );
  return { bytes: img.png(), format, annotation: peak };
}

function tickIndices(n: number, want = 6): number[] {
  const step = Math.max(1, Math.round(n / want));
  const out: number[] = [];
  for (let i = 0; i < n; i += step) out.push(i);
  if (out[out.length - 1] !== n - 1) out.push(n - 1);
  return out;
}
