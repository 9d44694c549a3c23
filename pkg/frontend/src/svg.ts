// SVG backend: renders a Figure to a standalone SVG string. No DOM, no
// dependencies; identical input data yields identical bytes.

import { Figure, Series } from "./figures.js";

export const WIDTH = 800;
export const HEIGHT = 500;
const MARGIN = { left: 60, right: 150, top: 40, bottom: 50 };

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

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

class Scale {
  constructor(private ext: Extent, private lo: number, private hi: number) {}

  map(v: number): number {
    const t = (v - this.ext.min) / (this.ext.max - this.ext.min);
    return this.lo + t * (this.hi - this.lo);
  }
}

function dataExtents(fig: Figure): { x: Extent; y: Extent } {
  if (fig.kind === "histogram") {
    const los = fig.bins.map((b) => b.lo);
    const his = fig.bins.map((b) => b.lo + fig.binWidth);
    return {
      x: extent([...los, ...his, 0]),
      y: extent([0, ...fig.bins.map((b) => b.count)]),
    };
  }
  const xs = fig.series.flatMap((s: Series) => s.points.map((p) => p[0]));
  const ys = fig.series.flatMap((s: Series) => s.points.map((p) => p[1]));
  return { x: extent(xs), y: extent([0, ...ys]) };
}

export function renderSvg(fig: Figure): string {
  const { x, y } = dataExtents(fig);
  const sx = new Scale(x, MARGIN.left, WIDTH - MARGIN.right);
  const sy = new Scale(y, HEIGHT - MARGIN.bottom, MARGIN.top);
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="20" text-anchor="middle" font-size="16">${fig.title}</text>`);

  // axes with ticks and faint gridlines
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  for (const t of ticks(x)) {
    const px = sx.map(t).toFixed(1);
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y1}" stroke="#eeeeee"/>`);
    parts.push(`<text x="${px}" y="${y0 + 18}" text-anchor="middle">${fmt(t)}</text>`);
  }
  for (const t of ticks(y)) {
    const py = sy.map(t).toFixed(1);
    parts.push(`<line x1="${x0}" y1="${py}" x2="${x1}" y2="${py}" stroke="#eeeeee"/>`);
    parts.push(`<text x="${x0 - 8}" y="${py}" text-anchor="end" dominant-baseline="middle">${fmt(t)}</text>`);
  }
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);
  parts.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle">${fig.xLabel}</text>`);
  parts.push(
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
    `transform="rotate(-90 16 ${(y0 + y1) / 2})">${fig.yLabel}</text>`,
  );

  if (fig.kind === "histogram") {
    const color = PALETTE[0];
    for (const bin of fig.bins) {
      const px = sx.map(bin.lo);
      const pw = sx.map(bin.lo + fig.binWidth) - px;
      const py = sy.map(bin.count);
      parts.push(
        `<rect x="${px.toFixed(1)}" y="${py.toFixed(1)}" width="${Math.max(pw - 1, 1).toFixed(1)}" ` +
        `height="${(sy.map(0) - py).toFixed(1)}" fill="${color}" fill-opacity="0.8"/>`,
      );
    }
  } else {
    fig.series.forEach((series, i) => {
      const color = PALETTE[i % PALETTE.length];
      if (fig.kind === "lines") {
        const pts = series.points
          .map(([px, py]) => `${sx.map(px).toFixed(1)},${sy.map(py).toFixed(1)}`)
          .join(" ");
        parts.push(`<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
      } else {
        for (const [px, py] of series.points) {
          parts.push(
            `<circle cx="${sx.map(px).toFixed(1)}" cy="${sy.map(py).toFixed(1)}" r="2.5" ` +
            `fill="${color}" fill-opacity="0.7"/>`,
          );
        }
      }
      // legend
      const ly = MARGIN.top + 20 * i;
      parts.push(`<rect x="${x1 + 12}" y="${ly - 9}" width="12" height="12" fill="${color}"/>`);
      parts.push(`<text x="${x1 + 30}" y="${ly}" dominant-baseline="middle">${series.label}</text>`);
    });
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
