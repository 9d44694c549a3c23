// Readers for the simulator's exported CSV files. Errors carry file and row
// so the CLI can point straight at the offending line.

import fs from "node:fs";

export class CsvError extends Error {
  constructor(file: string, row: number, message: string) {
    super(`${file}:${row}: ${message}`);
    this.name = "CsvError";
  }
}

export interface QueueRow {
  tick: number;
  station: number;
  length: number;
}

export interface WaitRow {
  task: number;
  station: number;
  arrival: number;
  completion: number;
  wait: number;
}

interface RawRow {
  row: number;
  cols: string[];
}

function parseIntStrict(file: string, row: number, field: string, text: string): number {
  if (!/^-?\d+$/.test(text)) {
    throw new CsvError(file, row, `${field} is not an integer: ${JSON.stringify(text)}`);
  }
  return parseInt(text, 10);
}

function readRows(file: string, header: string, columns: number): RawRow[] {
  let text: string;
  try {
    text = fs.readFileSync(file, "utf-8");
  } catch {
    throw new CsvError(file, 0, "cannot read file");
  }
  const lines = text.split("\n");
  if (lines.length === 0 || lines[0].trim() !== header) {
    throw new CsvError(file, 1, `expected header ${JSON.stringify(header)}`);
  }
  const rows: RawRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const cols = line.split(",");
    if (cols.length !== columns) {
      throw new CsvError(file, i + 1, `expected ${columns} columns, got ${cols.length}`);
    }
    rows.push({ row: i + 1, cols });
  }
  return rows;
}

export function readQueues(file: string): QueueRow[] {
  return readRows(file, "tick,station,length", 3).map(({ row, cols }) => ({
    tick: parseIntStrict(file, row, "tick", cols[0]),
    station: parseIntStrict(file, row, "station", cols[1]),
    length: parseIntStrict(file, row, "length", cols[2]),
  }));
}

export function readWaits(file: string): WaitRow[] {
  return readRows(file, "task,station,arrival,completion,wait", 5).map(({ row, cols }) => ({
    task: parseIntStrict(file, row, "task", cols[0]),
    station: parseIntStrict(file, row, "station", cols[1]),
    arrival: parseIntStrict(file, row, "arrival", cols[2]),
    completion: parseIntStrict(file, row, "completion", cols[3]),
    wait: parseIntStrict(file, row, "wait", cols[4]),
  }));
}
