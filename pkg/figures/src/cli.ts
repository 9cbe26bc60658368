/**
 * CLI: render one figure from an aggregate CSV.
 *
 *   spbp-plot --csv out/aggregate.csv --metric throughput --x lambda \
 *             --percentile mean --out throughput.svg [--title "..."]
 */

import { readFileSync, writeFileSync } from "fs";
import { parseAggregateCsv, MissingColumnError } from "./csv.js";
import { PlotSpec, renderFigure } from "./plot.js";

interface Args {
  csv: string;
  metric: string;
  x: "lambda" | "size";
  percentile: "mean" | "p95";
  out: string;
  title?: string;
}

function parseArgs(argv: string[]): Args {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed arguments near ${key}`);
    }
    flags.set(key.slice(2), argv[i + 1]);
  }
  for (const required of ["csv", "metric", "x", "percentile", "out"]) {
    if (!flags.has(required)) throw new Error(`missing --${required}`);
  }
  const x = flags.get("x")!;
  if (x !== "lambda" && x !== "size") throw new Error(`--x must be lambda|size, got ${x}`);
  const pct = flags.get("percentile")!;
  if (pct !== "mean" && pct !== "p95") {
    throw new Error(`--percentile must be mean|p95, got ${pct}`);
  }
  return {
    csv: flags.get("csv")!,
    metric: flags.get("metric")!,
    x,
    percentile: pct,
    out: flags.get("out")!,
    title: flags.get("title"),
  };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const rows = parseAggregateCsv(readFileSync(args.csv, "utf-8"));
    const spec: PlotSpec = {
      metric: args.metric,
      xAxis: args.x,
      percentile: args.percentile,
      title: args.title,
    };
    writeFileSync(args.out, renderFigure(rows, spec));
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof MissingColumnError) {
      console.error(`error: ${err.message}`);
    } else {
      console.error(`error: ${(err as Error).message}`);
    }
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
