/**
 * Shared plotting helpers: scales, ticks, the approximate-viridis colormap
 * (default; perceptually uniform enough for these maps), and a thin layer
 * that draws the same figure into either the raster or an SVG string.
 */

import { Raster, Rgb } from "./raster.js";

export interface Margins {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const MARGINS: Margins = { left: 70, right: 30, top: 36, bottom: 46 };

export class Scale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly pixLo: number,
    readonly pixHi: number,
    readonly log: boolean,
  ) {}

  static fit(values: number[], pixLo: number, pixHi: number, log = false): Scale {
    const finite = values.filter(Number.isFinite);
    let lo = Math.min(...finite);
    let hi = Math.max(...finite);
    if (lo === hi) {
      lo -= 0.5;
      hi += 0.5;
    }
    return new Scale(lo, hi, pixLo, pixHi, log);
  }

  pos(v: number): number {
    const t = this.log
      ? (Math.log10(v) - Math.log10(this.lo)) /
        (Math.log10(this.hi) - Math.log10(this.lo))
      : (v - this.lo) / (this.hi - this.lo);
    return this.pixLo + t * (this.pixHi - this.pixLo);
  }

  ticks(n = 5): number[] {
    if (this.log) {
      const a = Math.ceil(Math.log10(this.lo) - 1e-9);
      const b = Math.floor(Math.log10(this.hi) + 1e-9);
      const decades: number[] = [];
      for (let d = a; d <= b; d++) decades.push(10 ** d);
      if (decades.length >= 2) return decades;
      return [this.lo, Math.sqrt(this.lo * this.hi), this.hi];
    }
    const out: number[] = [];
    for (let i = 0; i < n; i++) out.push(this.lo + ((this.hi - this.lo) * i) / (n - 1));
    return out;
  }
}

export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(2).replace("e+", "e");
  return String(Number(v.toPrecision(4)));
}

// Approximate viridis anchors, interpolated linearly in RGB.
const VIRIDIS: Rgb[] = [
  [68, 1, 84],
  [72, 40, 120],
  [62, 73, 137],
  [49, 104, 142],
  [38, 130, 142],
  [31, 158, 137],
  [53, 183, 121],
  [110, 206, 88],
  [181, 222, 43],
  [253, 231, 37],
];

export function viridis(t: number): Rgb {
  const x = Math.min(1, Math.max(0, t)) * (VIRIDIS.length - 1);
  const i = Math.min(VIRIDIS.length - 2, Math.floor(x));
  const f = x - i;
  const a = VIRIDIS[i];
  const b = VIRIDIS[i + 1];
  return [
    Math.round(a[0] + f * (b[0] - a[0])),
    Math.round(a[1] + f * (b[1] - a[1])),
    Math.round(a[2] + f * (b[2] - a[2])),
  ];
}

export const BLACK: Rgb = [0, 0, 0];
export const GREY: Rgb = [150, 150, 150];
export const SERIES: Rgb[] = [
  [31, 119, 180],
  [214, 39, 40],
  [44, 160, 44],
];

export function drawAxes(
  img: Raster,
  xs: Scale,
  ys: Scale,
  xLabel: string,
  yLabel: string,
  title: string,
): void {
  img.line(xs.pixLo, ys.pixLo, xs.pixHi, ys.pixLo, BLACK); // x axis
  img.line(xs.pixLo, ys.pixLo, xs.pixLo, ys.pixHi, BLACK); // y axis
  for (const t of xs.ticks()) {
    const x = xs.pos(t);
    img.line(x, ys.pixLo, x, ys.pixLo + 4, BLACK);
    const label = fmt(t);
    img.text(x - img.textWidth(label) / 2, ys.pixLo + 8, label, BLACK);
  }
  for (const t of ys.ticks()) {
    const y = ys.pos(t);
    img.line(xs.pixLo - 4, y, xs.pixLo, y, BLACK);
    const label = fmt(t);
    img.text(xs.pixLo - 6 - img.textWidth(label), y - 3, label, BLACK);
  }
  img.text(
    (xs.pixLo + xs.pixHi) / 2 - img.textWidth(xLabel) / 2,
    ys.pixLo + 24,
    xLabel,
    BLACK,
  );
  img.text(6, MARGINS.top - 16, yLabel, BLACK);
  img.text(
    (xs.pixLo + xs.pixHi) / 2 - img.textWidth(title) / 2,
    10,
    title,
    BLACK,
  );
}

/** Tiny SVG document builder (vector output path). */
export class Svg {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: Rgb): void {
    this.parts.push(
      `<rect x="${n(x)}" y="${n(y)}" width="${n(w)}" height="${n(h)}" fill="${hex(fill)}"/>`,
    );
  }

  line(x0: number, y0: number, x1: number, y1: number, stroke: Rgb): void {
    this.parts.push(
      `<line x1="${n(x0)}" y1="${n(y0)}" x2="${n(x1)}" y2="${n(y1)}" stroke="${hex(stroke)}"/>`,
    );
  }

  polyline(xs: number[], ys: number[], stroke: Rgb): void {
    const pts = xs
      .map((x, i) => `${n(x)},${n(ys[i])}`)
      .join(" ");
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${hex(stroke)}" stroke-width="1.5"/>`,
    );
  }

  text(x: number, y: number, s: string, fill: Rgb, anchor = "start"): void {
    this.parts.push(
      `<text x="${n(x)}" y="${n(y)}" font-family="monospace" font-size="11" fill="${hex(fill)}" text-anchor="${anchor}">${escapeXml(s)}</text>`,
    );
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function n(v: number): string {
  return Number(v.toFixed(2)).toString();
}

function hex(c: Rgb): string {
  return "#" + c.map((v) => v.toString(16).padStart(2, "0")).join("");
}

export function escapeXml(s: string): string {
  return s
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function svgAxes(
  svg: Svg,
  xs: Scale,
  ys: Scale,
  xLabel: string,
  yLabel: string,
  title: string,
): void {
  svg.line(xs.pixLo, ys.pixLo, xs.pixHi, ys.pixLo, BLACK);
  svg.line(xs.pixLo, ys.pixLo, xs.pixLo, ys.pixHi, BLACK);
  for (const t of xs.ticks()) {
    const x = xs.pos(t);
    svg.line(x, ys.pixLo, x, ys.pixLo + 4, BLACK);
    svg.text(x, ys.pixLo + 16, fmt(t), BLACK, "middle");
  }
  for (const t of ys.ticks()) {
    const y = ys.pos(t);
    svg.line(xs.pixLo - 4, y, xs.pixLo, y, BLACK);
    svg.text(xs.pixLo - 6, y + 4, fmt(t), BLACK, "end");
  }
  svg.text((xs.pixLo + xs.pixHi) / 2, ys.pixLo + 32, xLabel, BLACK, "middle");
  svg.text(6, MARGINS.top - 10, yLabel, BLACK);
  svg.text((xs.pixLo + xs.pixHi) / 2, 16, title, BLACK, "middle");
}
