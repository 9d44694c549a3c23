// PNG backend: rasterizes the same figure geometry the SVG backend draws.
// Axis tick labels and legends use the built-in bitmap font (numbers and
// station tags); word labels are an SVG-only nicety.

import { Figure } from "./figures.js";
import { Canvas, encodePng, Rgb } from "./raster.js";
import { WIDTH, HEIGHT, PALETTE } from "./svg.js";

const MARGIN = { left: 60, right: 150, top: 40, bottom: 50 };
const BLACK: Rgb = [0, 0, 0];
const GRID: Rgb = [238, 238, 238];

function hexToRgb(hex: string): Rgb {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}

interface Extent {
  min: number;
  max: number;
}

function extent(values: number[]): Extent {
  if (values.length === 0) return { min: 0, max: 1 };
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (min === max) {
    min -= 1;
    max += 1;
  }
  return { min, max };
}

function ticks(ext: Extent, count = 6): number[] {
  const span = ext.max - ext.min;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const out: number[] = [];
  for (let v = Math.ceil(ext.min / chosen) * chosen; v <= ext.max + 1e-9; v += chosen) {
    out.push(Number(v.toFixed(6)));
  }
  return out;
}

function fmt(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(2);
}

export function renderPng(fig: Figure): Buffer {
  let xs: number[] = [];
  let ys: number[] = [0];
  if (fig.kind === "histogram") {
    xs = fig.bins.flatMap((b) => [b.lo, b.lo + fig.binWidth]).concat([0]);
    ys = ys.concat(fig.bins.map((b) => b.count));
  } else {
    xs = fig.series.flatMap((s) => s.points.map((p) => p[0]));
    ys = ys.concat(fig.series.flatMap((s) => s.points.map((p) => p[1])));
  }
  const ex = extent(xs);
  const ey = extent(ys);
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const px = (v: number) => x0 + ((v - ex.min) / (ex.max - ex.min)) * (x1 - x0);
  const py = (v: number) => y0 - ((v - ey.min) / (ey.max - ey.min)) * (y0 - y1);

  const canvas = new Canvas(WIDTH, HEIGHT);
  for (const t of ticks(ex)) {
    canvas.line(px(t), y0, px(t), y1, GRID);
    const label = fmt(t);
    canvas.text(px(t) - canvas.textWidth(label) / 2, y0 + 8, label, BLACK);
  }
  for (const t of ticks(ey)) {
    canvas.line(x0, py(t), x1, py(t), GRID);
    const label = fmt(t);
    canvas.text(x0 - 8 - canvas.textWidth(label), py(t) - 3, label, BLACK);
  }
  canvas.line(x0, y0, x1, y0, BLACK);
  canvas.line(x0, y0, x0, y1, BLACK);

  if (fig.kind === "histogram") {
    const color = hexToRgb(PALETTE[0]);
    for (const bin of fig.bins) {
      const bx = px(bin.lo);
      const bw = Math.max(px(bin.lo + fig.binWidth) - bx - 1, 1);
      canvas.fillRect(bx, py(bin.count), bw, y0 - py(bin.count), color);
    }
  } else {
    fig.series.forEach((series, i) => {
      const color = hexToRgb(PALETTE[i % PALETTE.length]);
      if (fig.kind === "lines") {
        for (let k = 1; k < series.points.length; k++) {
          const [ax, ay] = series.points[k - 1];
          const [bx, by] = series.points[k];
          canvas.line(px(ax), py(ay), px(bx), py(by), color);
        }
      } else {
        for (const [sx, sy] of series.points) {
          canvas.dot(px(sx), py(sy), color);
        }
      }
      const ly = MARGIN.top + 20 * i;
      canvas.fillRect(x1 + 12, ly - 6, 12, 12, color);
      canvas.text(x1 + 30, ly - 3, series.label, BLACK);
    });
  }

  return encodePng(canvas);
}
