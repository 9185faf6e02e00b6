/** Deterministic raster line-chart renderer.
 *
 * Draws straight onto an RGBA buffer and encodes PNG, so identical input
 * yields identical bytes. Text uses a built-in 5x7 bitmap font (uppercase,
 * digits and the symbols that appear in tick labels).
 */

import { PNG } from "pngjs";

import { FigureData, Series } from "./aggregate";

type RGB = [number, number, number];

const PALETTE: RGB[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
  [140, 86, 75],
  [23, 190, 207],
  [127, 127, 127],
];

const FONT: Record<string, string[]> = {
  A: [".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"],
  B: ["####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."],
  C: [".####", "#....", "#....", "#....", "#....", "#....", ".####"],
  D: ["####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."],
  E: ["#####", "#....", "#....", "####.", "#....", "#....", "#####"],
  F: ["#####", "#....", "#....", "####.", "#....", "#....", "#...."],
  G: [".####", "#....", "#....", "#.###", "#...#", "#...#", ".###."],
  H: ["#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"],
  I: ["#####", "..#..", "..#..", "..#..", "..#..", "..#..", "#####"],
  J: ["..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."],
  K: ["#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"],
  L: ["#....", "#....", "#....", "#....", "#....", "#....", "#####"],
  M: ["#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"],
  N: ["#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"],
  O: [".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."],
  P: ["####.", "#...#", "#...#", "####.", "#....", "#....", "#...."],
  Q: [".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"],
  R: ["####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"],
  S: [".####", "#....", "#....", ".###.", "....#", "....#", "####."],
  T: ["#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."],
  U: ["#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."],
  V: ["#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."],
  W: ["#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"],
  X: ["#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"],
  Y: ["#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."],
  Z: ["#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"],
  "0": [".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."],
  "1": ["..#..", ".##..", "..#..", "..#..", "..#..", "..#..", "#####"],
  "2": [".###.", "#...#", "....#", "..##.", ".#...", "#....", "#####"],
  "3": [".###.", "#...#", "....#", "..##.", "....#", "#...#", ".###."],
  "4": ["...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."],
  "5": ["#####", "#....", "####.", "....#", "....#", "#...#", ".###."],
  "6": [".###.", "#....", "#....", "####.", "#...#", "#...#", ".###."],
  "7": ["#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."],
  "8": [".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."],
  "9": [".###.", "#...#", "#...#", ".####", "....#", "....#", ".###."],
  " ": [".....", ".....", ".....", ".....", ".....", ".....", "....."],
  ".": [".....", ".....", ".....", ".....", ".....", ".##..", ".##.."],
  ",": [".....", ".....", ".....", ".....", ".....", "..#..", ".#..."],
  "-": [".....", ".....", ".....", ".###.", ".....", ".....", "....."],
  "+": [".....", "..#..", "..#..", "#####", "..#..", "..#..", "....."],
  "/": ["....#", "....#", "...#.", "..#..", ".#...", "#....", "#...."],
  "=": [".....", ".....", "#####", ".....", "#####", ".....", "....."],
  "(": ["...#.", "..#..", ".#...", ".#...", ".#...", "..#..", "...#."],
  ")": [".#...", "..#..", "...#.", "...#.", "...#.", "..#..", ".#..."],
  "%": ["##..#", "##..#", "...#.", "..#..", ".#...", "#..##", "#..##"],
  "_": [".....", ".....", ".....", ".....", ".....", ".....", "#####"],
};

export class Canvas {
  readonly png: PNG;

  constructor(readonly width: number, readonly height: number) {
    this.png = new PNG({ width, height });
    this.png.data.fill(255); // white, opaque
  }

  set(x: number, y: number, [r, g, b]: RGB): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    this.png.data[i] = r;
    this.png.data[i + 1] = g;
    this.png.data[i + 2] = b;
    this.png.data[i + 3] = 255;
  }

  hline(x0: number, x1: number, y: number, c: RGB): void {
    for (let x = Math.min(x0, x1); x <= Math.max(x0, x1); x++) this.set(x, y, c);
  }

  vline(x: number, y0: number, y1: number, c: RGB): void {
    for (let y = Math.min(y0, y1); y <= Math.max(y0, y1); y++) this.set(x, y, c);
  }

  /** Bresenham segment with a 2x2 pen. */
  line(x0: number, y0: number, x1: number, y1: number, c: RGB): void {
    let [x, y] = [Math.round(x0), Math.round(y0)];
    const [ex, ey] = [Math.round(x1), Math.round(y1)];
    const dx = Math.abs(ex - x);
    const dy = -Math.abs(ey - y);
    const sx = x < ex ? 1 : -1;
    const sy = y < ey ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(x, y, c);
      this.set(x + 1, y, c);
      this.set(x, y + 1, c);
      this.set(x + 1, y + 1, c);
      if (x === ex && y === ey) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
  }

  marker(x: number, y: number, c: RGB): void {
    for (let dx = -2; dx <= 2; dx++)
      for (let dy = -2; dy <= 2; dy++)
        if (Math.abs(dx) + Math.abs(dy) <= 3) this.set(x + dx, y + dy, c);
  }

  text(x: number, y: number, s: string, c: RGB = [0, 0, 0]): void {
    let cx = x;
    for (const raw of s.toUpperCase()) {
      const glyph = FONT[raw] ?? FONT[" "];
      for (let row = 0; row < 7; row++) {
        for (let col = 0; col < 5; col++) {
          if (glyph[row][col] === "#") this.set(cx + col, y + row, c);
        }
      }
      cx += 6;
    }
  }

  encode(): Buffer {
    return PNG.sync.write(this.png);
  }
}

export function textWidth(s: string): number {
  return s.length * 6 - 1;
}

function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-2) return v.toExponential(2).toUpperCase();
  return Number(v.toPrecision(3)).toString().toUpperCase();
}

export interface RenderOptions {
  width?: number;
  height?: number;
}

export function renderFigure(data: FigureData, opts: RenderOptions = {}): Buffer {
  const width = opts.width ?? 960;
  const height = opts.height ?? 600;
  const cv = new Canvas(width, height);
  const left = 96;
  const right = width - 24;
  const top = 56;
  const bottom = height - 64;
  const black: RGB = [0, 0, 0];
  const grid: RGB = [225, 225, 225];

  const xs = data.series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = data.series.flatMap((s) => s.points.map((p) => p[1]));
  let xMin = Math.min(...xs);
  let xMax = Math.max(...xs);
  if (xMin === xMax) {
    xMin -= 1;
    xMax += 1;
  }
  const yMax = Math.max(...ys, 0) * 1.08 || 1;
  const yMin = 0;

  const px = (x: number) => left + ((x - xMin) / (xMax - xMin)) * (right - left);
  const py = (y: number) => bottom - ((y - yMin) / (yMax - yMin)) * (bottom - top);

  // gridlines and ticks
  for (let i = 0; i <= 4; i++) {
    const yv = yMin + ((yMax - yMin) * i) / 4;
    const y = Math.round(py(yv));
    if (i > 0) cv.hline(left, right, y, grid);
    const label = formatTick(yv);
    cv.text(left - 8 - textWidth(label), y - 3, label);
    cv.hline(left - 4, left, y, black);
  }
  const uniqueXs = [...new Set(xs)].sort((a, b) => a - b);
  const step = Math.max(1, Math.ceil(uniqueXs.length / 12));
  uniqueXs
    .filter((_, i) => i % step === 0)
    .forEach((xv) => {
      const x = Math.round(px(xv));
      cv.vline(x, bottom, bottom + 4, black);
      const label = formatTick(xv);
      cv.text(x - Math.floor(textWidth(label) / 2), bottom + 8, label);
    });

  // axes
  cv.hline(left, right, bottom, black);
  cv.vline(left, top, bottom, black);

  // series
  data.series.forEach((s: Series, si: number) => {
    const color = PALETTE[si % PALETTE.length];
    for (let i = 1; i < s.points.length; i++) {
      const [xa, ya] = s.points[i - 1];
      const [xb, yb] = s.points[i];
      cv.line(px(xa), py(ya), px(xb), py(yb), color);
    }
    for (const [x, y] of s.points) cv.marker(Math.round(px(x)), Math.round(py(y)), color);
  });

  // legend (top-left inside the plot)
  data.series.forEach((s, si) => {
    const y = top + 8 + si * 14;
    const color = PALETTE[si % PALETTE.length];
    cv.hline(left + 10, left + 30, y + 3, color);
    cv.hline(left + 10, left + 30, y + 4, color);
    cv.text(left + 36, y, s.label);
  });

  // labels and annotation
  cv.text(left, top - 24, data.yLabel);
  const xl = data.xLabel;
  cv.text(Math.round((left + right) / 2 - textWidth(xl) / 2), height - 20, xl);
  const ann = data.trialAnnotation;
  cv.text(right - textWidth(ann), top - 24, ann);

  return cv.encode();
}
