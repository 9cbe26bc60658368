/**
 * Reader for the simulator's aggregate CSV.
 *
 * One row per (network_size, lambda, variant) group, wide columns
 * `{metric}_{stat}` and `{metric}_{stat}_ci95`. Empty cells are NaN
 * (undefined CI for single-run groups).
 */

export interface AggregateRow {
  network_size: number;
  lambda: number; // NaN when the sweep had no rate override
  variant: string;
  scheduler: string;
  n_runs: number;
  values: Record<string, number>;
}

export class MissingColumnError extends Error {
  constructor(public column: string) {
    super(`missing column in CSV: ${column}`);
  }
}

function toNumber(cell: string): number {
  if (cell === "" || cell === undefined) return NaN;
  const v = Number(cell);
  return Number.isFinite(v) ? v : NaN;
}

export function parseAggregateCsv(text: string): AggregateRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) return [];
  const header = lines[0].split(",");
  const idx = new Map(header.map((name, i) => [name, i]));
  for (const required of ["network_size", "lambda", "variant", "n_runs"]) {
    if (!idx.has(required)) throw new MissingColumnError(required);
  }
  const rows: AggregateRow[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    const values: Record<string, number> = {};
    header.forEach((name, i) => {
      if (!["network_size", "lambda", "variant", "scheduler", "n_runs"].includes(name)) {
        values[name] = toNumber(cells[i]);
      }
    });
    rows.push({
      network_size: toNumber(cells[idx.get("network_size")!]),
      lambda: toNumber(cells[idx.get("lambda")!]),
      variant: cells[idx.get("variant")!] ?? "",
      scheduler: idx.has("scheduler") ? cells[idx.get("scheduler")!] : "",
      n_runs: toNumber(cells[idx.get("n_runs")!]),
      values,
    });
  }
  return rows;
}
