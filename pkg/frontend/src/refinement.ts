import { scaleLinear } from "d3-scale";
import type { Table } from "./csv.js";
import { column, requireColumns } from "./csv.js";
import { ContractError } from "./errors.js";
import type { StudySummary } from "./schemas.js";
import {
  Box,
  SERIES_COLORS,
  marker,
  seriesPath,
  svgDocument,
  text,
  xAxis,
  yAxis,
} from "./svg.js";

export interface RefinementOptions {
  table: Table;
  source: string;
  summary: StudySummary;
  metadataJson: string;
}

const WIDTH = 640;
const HEIGHT = 420;
const BOX: Box = { x: 86, y: 56, width: WIDTH - 86 - 28, height: HEIGHT - 56 - 64 };

/** Two curves against grid size: the datum's norm (rising) and the sup metric. */
export function renderRefinement(opts: RefinementOptions): string {
  const { table, source, summary } = opts;
  if (table.rows.length < 2) {
    throw new ContractError(
      `${source}: insufficient-points (need at least 2 grid sizes, have ${table.rows.length})`,
    );
  }
  requireColumns(table, ["N", "data_norm", "sup_metric"], source);

  const ns = column(table, "N");
  const csvNs = ns.map((n) => Math.round(n));
  const summaryNs = summary.rows.map((r) => r.N);
  if (JSON.stringify(csvNs) !== JSON.stringify(summaryNs)) {
    throw new ContractError(
      `${source}: grid sizes disagree with the study summary (${csvNs.join(",")} vs ${summaryNs.join(",")})`,
    );
  }

  const dataNorm = column(table, "data_norm");
  const supMetric = column(table, "sup_metric");
  const finite = [...dataNorm, ...supMetric].filter((v) => Number.isFinite(v));
  if (finite.length === 0) {
    throw new ContractError(`${source}: no finite values to plot`);
  }
  const yMax = Math.max(...finite);

  const nLo = Math.min(...csvNs);
  const nHi = Math.max(...csvNs);
  const padN = (nHi - nLo) * 0.06;
  const sx = scaleLinear().domain([nLo - padN, nHi + padN]).range([BOX.x, BOX.x + BOX.width]);
  const sy = scaleLinear().domain([0, yMax * 1.08]).range([BOX.y + BOX.height, BOX.y]);

  const body: string[] = [];
  body.push(text(BOX.x, 26, `refinement study — ${source}`, { size: 14, bold: true }));
  body.push(xAxis(sx, BOX, "spectral cutoff N", csvNs));
  body.push(yAxis(sy, BOX, "norm"));

  const series: { name: string; values: number[]; color: string; shape: "circle" | "square" }[] = [
    { name: "initial-datum norm", values: dataNorm, color: SERIES_COLORS[0]!, shape: "circle" },
    { name: "sup smoothing metric", values: supMetric, color: SERIES_COLORS[1]!, shape: "square" },
  ];
  for (const s of series) {
    body.push(seriesPath(csvNs, s.values, sx, sy, s.color));
    s.values.forEach((v, i) => {
      if (Number.isFinite(v)) body.push(marker(sx(csvNs[i]!), sy(v), s.color, s.shape));
    });
  }

  // Legend.
  series.forEach((s, i) => {
    const lx = BOX.x + 14;
    const ly = BOX.y + 16 + i * 18;
    body.push(marker(lx, ly - 4, s.color, s.shape));
    body.push(text(lx + 10, ly, s.name, { size: 12 }));
  });

  // Verdict and spread annotation from the summary.
  body.push(
    text(BOX.x + BOX.width - 6, BOX.y + 16, `verdict: ${summary.verdict}`, {
      anchor: "end",
      size: 13,
      bold: true,
      color: summary.verdict === "pass" ? "#2ca02c" : "#d62728",
    }),
  );
  if (summary.metric_ratio !== null) {
    body.push(
      text(BOX.x + BOX.width - 6, BOX.y + 34, `sup-metric max/min = ${summary.metric_ratio.toPrecision(4)}`, {
        anchor: "end",
        size: 12,
        color: "#444",
      }),
    );
  }

  return svgDocument(WIDTH, HEIGHT, opts.metadataJson, body.join("\n"));
}
