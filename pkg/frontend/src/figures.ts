// Pure data shaping: CSV rows -> figure geometry. Kept separate from the
// SVG/PNG backends so point counts and binning are directly testable.

import { QueueRow, WaitRow } from "./csv.js";

export interface Series {
  label: string;
  points: Array<[number, number]>; // x, y in data space
}

export interface LineFigure {
  kind: "lines";
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

export interface ScatterFigure {
  kind: "scatter";
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

export interface HistogramFigure {
  kind: "histogram";
  title: string;
  xLabel: string;
  yLabel: string;
  binWidth: number;
  bins: Array<{ lo: number; count: number }>;
}

export type Figure = LineFigure | ScatterFigure | HistogramFigure;

export function pointCount(fig: Figure): number {
  if (fig.kind === "histogram") {
    return fig.bins.reduce((acc, b) => acc + b.count, 0);
  }
  return fig.series.reduce((acc, s) => acc + s.points.length, 0);
}

export function queueFigure(rows: QueueRow[]): LineFigure {
  const byStation = new Map<number, Array<[number, number]>>();
  for (const r of rows) {
    if (!byStation.has(r.station)) byStation.set(r.station, []);
    byStation.get(r.station)!.push([r.tick, r.length]);
  }
  const stations = [...byStation.keys()].sort((a, b) => a - b);
  return {
    kind: "lines",
    title: "Queue length evolution",
    xLabel: "tick",
    yLabel: "queue length",
    series: stations.map((s) => ({
      label: `S${s}`,
      points: byStation.get(s)!,
    })),
  };
}

export function waitFigure(rows: WaitRow[]): ScatterFigure {
  const byStation = new Map<number, Array<[number, number]>>();
  for (const r of rows) {
    if (!byStation.has(r.station)) byStation.set(r.station, []);
    byStation.get(r.station)!.push([r.arrival, r.wait]);
  }
  const stations = [...byStation.keys()].sort((a, b) => a - b);
  return {
    kind: "scatter",
    title: "Task completion times",
    xLabel: "arrival tick",
    yLabel: "wait (ticks)",
    series: stations.map((s) => ({
      label: `S${s}`,
      points: byStation.get(s)!,
    })),
  };
}

export function histogramFigure(rows: WaitRow[], binWidth: number): HistogramFigure {
  if (binWidth <= 0) throw new Error(`bin width must be > 0, got ${binWidth}`);
  const counts = new Map<number, number>();
  for (const r of rows) {
    const lo = Math.floor(r.wait / binWidth) * binWidth;
    counts.set(lo, (counts.get(lo) ?? 0) + 1);
  }
  const bins = [...counts.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([lo, count]) => ({ lo, count }));
  return {
    kind: "histogram",
    title: "Wait time distribution",
    xLabel: "wait (ticks)",
    yLabel: "tasks",
    binWidth,
    bins,
  };
}
