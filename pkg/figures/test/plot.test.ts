import { readFileSync } from "fs";
import { join, dirname } from "path";
import { fileURLToPath } from "url";
import { mkdtempSync, existsSync, statSync } from "fs";
import { tmpdir } from "os";
import { describe, expect, it } from "vitest";

import { MissingColumnError, parseAggregateCsv } from "../src/csv.js";
import { PlotSpec, extractSeries, renderFigure } from "../src/plot.js";
import { main } from "../src/cli.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

function load(name: string) {
  return parseAggregateCsv(readFileSync(join(FIXTURES, name), "utf-8"));
}

// the four figure types the tool exists to draw
const FIGURES: Array<{ fixture: string; spec: PlotSpec }> = [
  {
    fixture: "aggregate_lambda.csv",
    spec: { metric: "throughput", xAxis: "lambda", percentile: "mean" },
  },
  {
    fixture: "aggregate_size.csv",
    spec: { metric: "composite_latency", xAxis: "size", percentile: "mean" },
  },
  {
    fixture: "aggregate_size.csv",
    spec: { metric: "delivery_ratio", xAxis: "size", percentile: "mean" },
  },
  {
    fixture: "aggregate_size.csv",
    spec: { metric: "trip_length", xAxis: "size", percentile: "p95" },
  },
];

describe("figure rendering", () => {
  it.each(FIGURES)("renders $spec.metric vs $spec.xAxis", ({ fixture, spec }) => {
    const rows = load(fixture);
    const svg = renderFigure(rows, spec);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.length).toBeGreaterThan(500);
    const variants = new Set(rows.map((r) => r.variant));
    for (const v of variants) {
      expect(svg).toContain(`data-variant="${v}"`);
    }
  });

  it("draws the ablation variant dashed with square markers", () => {
    const svg = renderFigure(load("aggregate_size.csv"), {
      metric: "trip_length",
      xAxis: "size",
      percentile: "mean",
    });
    const dashed = svg
      .split("\n")
      .filter((l) => l.includes('data-variant="MaxU-MIMO-decouple"'));
    expect(dashed.some((l) => l.includes("stroke-dasharray"))).toBe(true);
    expect(svg).toContain('data-variant-marker="MaxU-MIMO-decouple"');
    expect(svg).toMatch(/<rect data-variant-marker="MaxU-MIMO-decouple"/);
  });

  it("renders a single-point variant without a confidence band", () => {
    const svg = renderFigure(load("single_point.csv"), {
      metric: "throughput",
      xAxis: "lambda",
      percentile: "mean",
    });
    expect(svg).toContain('data-variant-marker="Lonely"');
    expect(svg).not.toContain("data-variant-band");
    expect(svg).not.toContain('data-variant="Lonely"'); // no line from one point
  });

  it("plots CSV values exactly (no resampling)", () => {
    const rows = load("dominance.csv");
    const series = extractSeries(rows, {
      metric: "throughput",
      xAxis: "lambda",
      percentile: "mean",
    });
    const maxu = series.find((s) => s.variant === "MaxU")!;
    const fromCsv = rows
      .filter((r) => r.variant === "MaxU")
      .map((r) => r.values["throughput_mean"]);
    expect(maxu.points.map((p) => p.y)).toEqual(fromCsv);
  });

  it("dominance fixture renders MaxU strictly above Excl", () => {
    const svg = renderFigure(load("dominance.csv"), {
      metric: "throughput",
      xAxis: "lambda",
      percentile: "mean",
    });
    const line = (variant: string) => {
      const m = svg.match(new RegExp(`data-variant="${variant}" points="([^"]+)"`));
      expect(m).not.toBeNull();
      return m![1].split(" ").map((pt) => pt.split(",").map(Number));
    };
    const maxu = line("MaxU");
    const excl = line("Excl");
    expect(maxu.length).toBe(excl.length);
    for (let i = 0; i < maxu.length; i++) {
      expect(maxu[i][0]).toBeCloseTo(excl[i][0], 5); // same x grid
      expect(maxu[i][1]).toBeLessThan(excl[i][1]); // smaller SVG y = higher value
    }
  });

  it("reports a missing metric column by name", () => {
    expect(() =>
      renderFigure(load("aggregate_size.csv"), {
        metric: "jitter",
        xAxis: "size",
        percentile: "mean",
      }),
    ).toThrowError(/jitter_mean/);
  });
});

describe("csv parsing", () => {
  it("reads groups, sizes and NaN lambda", () => {
    const rows = load("aggregate_size.csv");
    expect(rows.length).toBeGreaterThan(0);
    expect(new Set(rows.map((r) => r.network_size))).toEqual(new Set([10, 14, 18]));
    expect(Number.isNaN(rows[0].lambda)).toBe(true);
    expect(rows[0].n_runs).toBeGreaterThan(1);
  });

  it("rejects a CSV without mandatory columns", () => {
    expect(() => parseAggregateCsv("a,b\n1,2\n")).toThrow(MissingColumnError);
  });
});

describe("cli", () => {
  it("writes an SVG file and returns 0", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const out = join(dir, "thr.svg");
    const rc = main([
      "--csv", join(FIXTURES, "aggregate_lambda.csv"),
      "--metric", "throughput",
      "--x", "lambda",
      "--percentile", "mean",
      "--out", out,
    ]);
    expect(rc).toBe(0);
    expect(existsSync(out)).toBe(true);
    expect(statSync(out).size).toBeGreaterThan(500);
  });

  it("returns 2 on bad flags and 1 on missing column", () => {
    expect(main(["--csv", "x.csv"])).toBe(2);
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const rc = main([
      "--csv", join(FIXTURES, "aggregate_lambda.csv"),
      "--metric", "nope",
      "--x", "lambda",
      "--percentile", "mean",
      "--out", join(dir, "x.svg"),
    ]);
    expect(rc).toBe(1);
  });
});
