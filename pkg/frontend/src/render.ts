// Orchestration: read an export directory, shape the requested figures,
// write one image per figure.

import fs from "node:fs";
import path from "node:path";

import { readQueues, readWaits } from "./csv.js";
import {
  Figure,
  histogramFigure,
  pointCount,
  queueFigure,
  waitFigure,
} from "./figures.js";
import { renderPng } from "./png.js";
import { renderSvg } from "./svg.js";

export const FIGURE_NAMES = ["queues", "waits", "histogram"] as const;
export type FigureName = (typeof FIGURE_NAMES)[number];

export interface FigureSpec {
  inDir: string;
  outDir: string;
  figures: FigureName[];
  format: "svg" | "png";
  binWidth: number;
}

export interface RenderedFigure {
  name: FigureName;
  file: string;
  points: number;
}

export function defaultSpec(inDir: string, outDir: string): FigureSpec {
  return { inDir, outDir, figures: [...FIGURE_NAMES], format: "svg", binWidth: 20 };
}

const OUTPUT_BASENAME: Record<FigureName, string> = {
  queues: "queues",
  waits: "waits",
  histogram: "hist",
};

export function render(spec: FigureSpec): RenderedFigure[] {
  if (spec.binWidth <= 0) {
    throw new Error(`bin width must be > 0, got ${spec.binWidth}`);
  }
  fs.mkdirSync(spec.outDir, { recursive: true });
  const out: RenderedFigure[] = [];
  for (const name of spec.figures) {
    let figure: Figure;
    if (name === "queues") {
      figure = queueFigure(readQueues(path.join(spec.inDir, "queues.csv")));
    } else if (name === "waits") {
      figure = waitFigure(readWaits(path.join(spec.inDir, "waits.csv")));
    } else {
      figure = histogramFigure(readWaits(path.join(spec.inDir, "waits.csv")), spec.binWidth);
    }
    const file = path.join(spec.outDir, `${OUTPUT_BASENAME[name]}.${spec.format}`);
    if (spec.format === "svg") {
      fs.writeFileSync(file, renderSvg(figure), "utf-8");
    } else {
      fs.writeFileSync(file, renderPng(figure));
    }
    out.push({ name, file, points: pointCount(figure) });
  }
  return out;
}
