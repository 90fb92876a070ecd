/**
 * Induced-phase-profile diagnostic: real part, imaginary part and modulus
 * of the conditional phase factor against time.
 */

import { parseCsv } from "./csv.js";
import { MARGINS, Scale, SERIES, Svg, drawAxes, svgAxes } from "./plot.js";
import { Raster } from "./raster.js";
import type { RenderResult } from "./render.js";

export const PROFILE_HEADER = ["t_fs", "re", "im", "arg_rad", "abs"];

const LABELS = ["re", "im", "abs"] as const;
const COLUMNS = [1, 2, 4];

export function renderProfile(
  text: string,
  format: "png" | "svg",
  width = 720,
  height = 480,
): RenderResult {
  const table = parseCsv(text, PROFILE_HEADER);
  const t = table.rows.map((r) => r[0]);
  const series = COLUMNS.map((c) => table.rows.map((r) => r[c]));
  const xs = Scale.fit(t, MARGINS.left, width - MARGINS.right);
  const ys = Scale.fit(
    [...series.flat(), -1, 1],
    height - MARGINS.bottom,
    MARGINS.top,
  );
  const title = "induced phase profile";

  if (format === "svg") {
    const svg = new Svg(width, height);
    svgAxes(svg, xs, ys, "t_fs", "value", title);
    series.forEach((s, k) => {
      svg.polyline(t.map((v) => xs.pos(v)), s.map((v) => ys.pos(v)), SERIES[k]);
      svg.text(width - MARGINS.right - 40, MARGINS.top + 14 * (k + 1), LABELS[k], SERIES[k]);
    });
    return { bytes: Buffer.from(svg.toString(), "utf-8"), format };
  }
  const img = new Raster(width, height);
  drawAxes(img, xs, ys, "t_fs", "value", title);
  series.forEach((s, k) => {
    img.polyline(t.map((v) => xs.pos(v)), s.map((v) => ys.pos(v)), SERIES[k]);
    img.text(width - MARGINS.right - 40, MARGINS.top + 12 * (k + 1), LABELS[k], SERIES[k]);
  });
  return { bytes: img.png(), format };
}
