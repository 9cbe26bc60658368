/**
 * SVG line figures from aggregate rows: one line per variant, markers per
 * point, shaded 95% confidence band where the CI is defined. Values are
 * plotted exactly as they appear in the CSV; nothing is recomputed.
 */

import { AggregateRow, MissingColumnError } from "./csv.js";

export interface PlotSpec {
  metric: string; // column stem, e.g. "composite_latency"
  xAxis: "lambda" | "size";
  percentile: "mean" | "p95";
  title?: string;
}

export interface SeriesPoint {
  x: number;
  y: number;
  ci: number; // NaN when undefined
}

export interface Series {
  variant: string;
  points: SeriesPoint[];
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 40, right: 160, bottom: 56, left: 72 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function extractSeries(rows: AggregateRow[], spec: PlotSpec): Series[] {
  const col = `${spec.metric}_${spec.percentile}`;
  const ciCol = `${col}_ci95`;
  if (rows.length > 0 && !(col in rows[0].values)) {
    throw new MissingColumnError(col);
  }
  const byVariant = new Map<string, SeriesPoint[]>();
  for (const row of rows) {
    const x = spec.xAxis === "lambda" ? row.lambda : row.network_size;
    const y = row.values[col];
    if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
    if (!byVariant.has(row.variant)) byVariant.set(row.variant, []);
    byVariant.get(row.variant)!.push({ x, y, ci: row.values[ciCol] ?? NaN });
  }
  const series: Series[] = [];
  for (const [variant, points] of byVariant) {
    points.sort((a, b) => a.x - b.x);
    series.push({ variant, points });
  }
  return series;
}

function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= count)!;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12; v += step) {
    ticks.push(Number(v.toFixed(10)));
  }
  return ticks;
}

function fmt(v: number): string {
  return Number(v.toFixed(2)).toString();
}

function fmtTick(v: number): string {
  return Math.abs(v) >= 1000 ? v.toFixed(0) : Number(v.toPrecision(4)).toString();
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function isAblation(variant: string): boolean {
  return /decouple|-dec\b/i.test(variant);
}

export function renderSvg(series: Series[], spec: PlotSpec): string {
  const pts = series.flatMap((s) => s.points);
  const xs = pts.map((p) => p.x);
  const yLo = pts.map((p) => (Number.isFinite(p.ci) ? p.y - p.ci : p.y));
  const yHi = pts.map((p) => (Number.isFinite(p.ci) ? p.y + p.ci : p.y));
  const xMin = Math.min(...xs, 0 / 0) || Math.min(...xs);
  const xMax = Math.max(...xs);
  let lo = Math.min(...yLo);
  let hi = Math.max(...yHi);
  if (!Number.isFinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (hi === lo) {
    hi = lo + 1;
  }
  const pad = (hi - lo) * 0.06;
  lo -= pad;
  hi += pad;
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) =>
    xMax === xMin
      ? MARGIN.left + plotW / 2
      : MARGIN.left + ((x - xMin) / (xMax - xMin)) * plotW;
  const sy = (y: number) => MARGIN.top + (1 - (y - lo) / (hi - lo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  const title = spec.title ?? `${spec.metric} (${spec.percentile})`;
  parts.push(
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="16">${esc(title)}</text>`,
  );

  // axes
  const axisY = HEIGHT - MARGIN.bottom;
  parts.push(
    `<line x1="${MARGIN.left}" y1="${axisY}" x2="${WIDTH - MARGIN.right}" y2="${axisY}" stroke="black"/>`,
  );
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${axisY}" stroke="black"/>`,
  );
  for (const t of niceTicks(xMin, xMax)) {
    const px = sx(t);
    parts.push(`<line x1="${fmt(px)}" y1="${axisY}" x2="${fmt(px)}" y2="${axisY + 5}" stroke="black"/>`);
    parts.push(
      `<text x="${fmt(px)}" y="${axisY + 20}" text-anchor="middle" font-size="12">${fmtTick(t)}</text>`,
    );
  }
  for (const t of niceTicks(lo, hi)) {
    const py = sy(t);
    parts.push(`<line x1="${MARGIN.left - 5}" y1="${fmt(py)}" x2="${MARGIN.left}" y2="${fmt(py)}" stroke="black"/>`);
    parts.push(
      `<text x="${MARGIN.left - 9}" y="${fmt(py + 4)}" text-anchor="end" font-size="12">${fmtTick(t)}</text>`,
    );
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(py)}" x2="${WIDTH - MARGIN.right}" y2="${fmt(py)}" stroke="#dddddd" stroke-dasharray="2,4"/>`,
    );
  }
  const xLabel = spec.xAxis === "lambda" ? "flow rate λ (packets/slot)" : "network size |V|";
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13">${esc(xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${esc(`${spec.metric} (${spec.percentile})`)}</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const ablation = isAblation(s.variant);
    const banded = s.points.filter((p) => Number.isFinite(p.ci));
    if (banded.length >= 2) {
      const upper = banded.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y + p.ci))}`);
      const lower = banded
        .slice()
        .reverse()
        .map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y - p.ci))}`);
      parts.push(
        `<polygon data-variant-band="${esc(s.variant)}" points="${upper.concat(lower).join(" ")}" fill="${color}" opacity="0.15"/>`,
      );
    }
    if (s.points.length >= 2) {
      const line = s.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`).join(" ");
      const dash = ablation ? ` stroke-dasharray="6,4"` : "";
      parts.push(
        `<polyline data-variant="${esc(s.variant)}" points="${line}" fill="none" stroke="${color}" stroke-width="2"${dash}/>`,
      );
    }
    for (const p of s.points) {
      const cx = fmt(sx(p.x));
      const cy = fmt(sy(p.y));
      if (ablation) {
        parts.push(
          `<rect data-variant-marker="${esc(s.variant)}" x="${fmt(sx(p.x) - 3.5)}" y="${fmt(sy(p.y) - 3.5)}" width="7" height="7" fill="${color}"/>`,
        );
      } else {
        parts.push(
          `<circle data-variant-marker="${esc(s.variant)}" cx="${cx}" cy="${cy}" r="3.5" fill="${color}"/>`,
        );
      }
    }
    const ly = MARGIN.top + 14 + i * 20;
    const lx = WIDTH - MARGIN.right + 12;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 24}" y2="${ly - 4}" stroke="${color}" stroke-width="2"${ablation ? ` stroke-dasharray="6,4"` : ""}/>`,
    );
    parts.push(`<text x="${lx + 30}" y="${ly}" font-size="12">${esc(s.variant)}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export function renderFigure(rows: AggregateRow[], spec: PlotSpec): string {
  return renderSvg(extractSeries(rows, spec), spec);
}
