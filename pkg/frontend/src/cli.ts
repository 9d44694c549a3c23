#!/usr/bin/env node
// plots --in <dir> --out <dir> [--figures queues,waits,histogram]
//       [--format svg|png] [--bin-width N]

import { CsvError } from "./csv.js";
import { defaultSpec, FIGURE_NAMES, FigureName, render } from "./render.js";

function usage(): never {
  console.error(
    "usage: plots --in <dir> --out <dir> " +
    "[--figures queues,waits,histogram] [--format svg|png] [--bin-width N]",
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  let inDir: string | undefined;
  let outDir: string | undefined;
  let figures: FigureName[] | undefined;
  let format: "svg" | "png" = "svg";
  let binWidth = 20;

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) usage();
      return argv[++i];
    };
    if (arg === "--in") inDir = next();
    else if (arg === "--out") outDir = next();
    else if (arg === "--figures") {
      figures = next().split(",").map((f) => {
        if (!(FIGURE_NAMES as readonly string[]).includes(f)) {
          console.error(`unknown figure: ${f}`);
          process.exit(2);
        }
        return f as FigureName;
      });
    } else if (arg === "--format") {
      const value = next();
      if (value !== "svg" && value !== "png") {
        console.error(`unknown format: ${value}`);
        process.exit(2);
      }
      format = value;
    } else if (arg === "--bin-width") {
      binWidth = Number(next());
      if (!Number.isFinite(binWidth) || binWidth <= 0) {
        console.error(`invalid bin width: ${argv[i]}`);
        process.exit(2);
      }
    } else {
      console.error(`unknown flag: ${arg}`);
      usage();
    }
  }
  if (!inDir || !outDir) usage();

  const spec = defaultSpec(inDir, outDir);
  spec.format = format;
  spec.binWidth = binWidth;
  if (figures) spec.figures = figures;

  try {
    for (const fig of render(spec)) {
      console.log(`${fig.file}: ${fig.points} data points`);
    }
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(err.message);
      return 1;
    }
    throw err;
  }
  return 0;
}

process.exit(main(process.argv.slice(2)));
