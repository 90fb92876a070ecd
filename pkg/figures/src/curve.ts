/**
 * Bound-versus-damping curve (the F_max sweep table), damping on a log axis.
 */

import { parseCsv } from "./csv.js";
import { MARGINS, Scale, SERIES, Svg, drawAxes, svgAxes } from "./plot.js";
import { Raster } from "./raster.js";
import type { RenderResult } from "./render.js";

export const CURVE_HEADER = ["gamma_norm", "omega0_th", "him_l1_norm", "fmax"];

export function renderCurve(
  text: string,
  format: "png" | "svg",
  width = 720,
  height = 480,
): RenderResult {
  const table = parseCsv(text, CURVE_HEADER);
  const gamma = table.rows.map((r) => r[0]);
  const f = table.rows.map((r) => r[3]);
  const xs = Scale.fit(gamma, MARGINS.left, width - MARGINS.right, true);
  const ys = Scale.fit([...f, 2 / 3, 5 / 6], height - MARGINS.bottom, MARGINS.top);
  const title = "fmax vs gamma_norm";

  if (format === "svg") {
    const svg = new Svg(width, height);
    svgAxes(svg, xs, ys, "gamma_norm (log)", "fmax", title);
    svg.polyline(gamma.map((g) => xs.pos(g)), f.map((v) => ys.pos(v)), SERIES[0]);
    return { bytes: Buffer.from(svg.toString(), "utf-8"), format };
  }
  const img = new Raster(width, height);
  drawAxes(img, xs, ys, "gamma_norm (log)", "fmax", title);
  img.polyline(gamma.map((g) => xs.pos(g)), f.map((v) => ys.pos(v)), SERIES[0]);
  return { bytes: img.png(), format };
}
