import { scaleLinear, scaleLog } from "d3-scale";
import type { Table } from "./csv.js";
import { column, requireColumns } from "./csv.js";
import { ContractError } from "./errors.js";
import type { RunSummary } from "./schemas.js";
import {
  Box,
  SERIES_COLORS,
  seriesPath,
  svgDocument,
  text,
  xAxis,
  yAxis,
} from "./svg.js";

export interface TimeseriesOptions {
  table: Table;
  /** Name of the CSV, for titles and error messages. */
  source: string;
  /** Columns to draw, one panel each; defaults to every non-time column. */
  columns?: string[];
  /** Columns whose panel uses a log y-axis (decay panels). */
  logColumns?: string[];
  /** Run summary; enables the fitted-decay overlay on the momentum panel. */
  summary?: RunSummary;
  /** Provenance JSON to embed. */
  metadataJson: string;
}

const WIDTH = 760;
const MARGIN_LEFT = 78;
const MARGIN_RIGHT = 24;
const PANEL_HEIGHT = 150;
const PANEL_GAP = 52;
const TOP = 44;

function finiteExtent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo > hi) throw new ContractError("series has no finite values");
  return [lo, hi];
}

function paddedLinearDomain(values: number[]): [number, number] {
  const [lo, hi] = finiteExtent(values);
  const scale = Math.max(1, Math.abs(lo), Math.abs(hi));
  if (hi - lo <= 1e-9 * scale) {
    // Variation below plotting precision: draw a flat line on a fixed band
    // instead of stretching floating-point noise across the panel.
    const mid = (lo + hi) / 2;
    const pad = Math.max(1, Math.abs(mid) * 0.1);
    return [mid - pad, mid + pad];
  }
  const pad = (hi - lo) * 0.05;
  return [lo - pad, hi + pad];
}

function logDomain(values: number[], name: string): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v) && v > 0) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo > hi) {
    throw new ContractError(`log scale requested for "${name}" but it has no positive values`);
  }
  if (lo === hi) return [lo / 10, hi * 10];
  return [lo, hi];
}

/** Fitted-rate annotation text; tests match this string against summary.json. */
export function decayAnnotation(rate: number): string {
  return `fitted decay rate = ${rate.toPrecision(6)}`;
}

export function renderTimeseries(opts: TimeseriesOptions): string {
  const { table, source } = opts;
  if (table.rows.length === 0) {
    throw new ContractError(`${source}: no rows`);
  }
  const columns = opts.columns ?? table.columns.filter((c) => c !== "t");
  if (columns.length === 0) {
    throw new ContractError(`${source}: no columns to plot`);
  }
  requireColumns(table, ["t", ...columns], source);
  const logSet = new Set(opts.logColumns ?? []);
  for (const name of logSet) {
    if (!columns.includes(name)) {
      throw new ContractError(`${source}: log-scale column "${name}" is not being plotted`);
    }
  }

  const times = column(table, "t");
  const [t0, t1] = finiteExtent(times);
  const plotWidth = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
  const height = TOP + columns.length * (PANEL_HEIGHT + PANEL_GAP);
  const sx = scaleLinear().domain([t0, t1]).range([MARGIN_LEFT, MARGIN_LEFT + plotWidth]);

  const body: string[] = [];
  const title = opts.summary ? `${source} — run ${opts.summary.run_id}` : source;
  body.push(text(MARGIN_LEFT, 24, title, { size: 14, bold: true }));

  columns.forEach((name, index) => {
    const box: Box = {
      x: MARGIN_LEFT,
      y: TOP + index * (PANEL_HEIGHT + PANEL_GAP),
      width: plotWidth,
      height: PANEL_HEIGHT,
    };
    const values = column(table, name);
    const useLog = logSet.has(name);
    const plotted = useLog ? values.map((v) => (v > 0 ? v : NaN)) : values;
    const sy = useLog
      ? scaleLog().domain(logDomain(values, name)).range([box.y + box.height, box.y])
      : scaleLinear().domain(paddedLinearDomain(values)).range([box.y + box.height, box.y]);

    const isLast = index === columns.length - 1;
    body.push(xAxis(sx, box, isLast ? "t" : undefined));
    body.push(yAxis(sy, box, name + (useLog ? " (log)" : "")));
    body.push(seriesPath(times, plotted, sx, sy, SERIES_COLORS[0]!));
    body.push(text(box.x + 6, box.y - 6, name, { size: 12, bold: true, color: "#444" }));

    const fit = opts.summary?.decay_fit ?? null;
    if (name === "momentum" && fit) {
      const [w0, w1] = fit.window;
      const nFit = 200;
      const ft: number[] = [];
      const fv: number[] = [];
      for (let i = 0; i <= nFit; i++) {
        const t = w0 + ((w1 - w0) * i) / nFit;
        ft.push(t);
        fv.push(Math.exp(fit.intercept - fit.rate * t));
      }
      body.push(seriesPath(ft, fv, sx, sy, SERIES_COLORS[1]!, { dashed: true, width: 1.25 }));
      body.push(
        text(box.x + box.width - 6, box.y + 14, decayAnnotation(fit.rate), {
          anchor: "end",
          size: 12,
          color: SERIES_COLORS[1]!,
        }),
      );
    }
  });

  return svgDocument(WIDTH, height, opts.metadataJson, body.join("\n"));
}
