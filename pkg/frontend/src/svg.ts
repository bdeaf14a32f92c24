import { line as d3line } from "d3-shape";
import type { ScaleContinuousNumeric } from "d3-scale";
import { format } from "d3-format";

/** Escape text content / attribute values for XML. */
export function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Fixed-point pixel coordinates keep the output byte-deterministic. */
export function px(value: number): string {
  return value.toFixed(2);
}

export interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
}

export type Scale = ScaleContinuousNumeric<number, number>;

export const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"] as const;

const tickLabel = format("~g");

/** Bottom axis with vertical grid lines across the box. */
export function xAxis(scale: Scale, box: Box, label?: string, tickValues?: number[]): string {
  const parts: string[] = [];
  const y0 = box.y + box.height;
  parts.push(
    `<line x1="${px(box.x)}" y1="${px(y0)}" x2="${px(box.x + box.width)}" y2="${px(y0)}" stroke="#333" stroke-width="1"/>`,
  );
  for (const t of tickValues ?? scale.ticks(6)) {
    const sx = scale(t);
    parts.push(
      `<line x1="${px(sx)}" y1="${px(box.y)}" x2="${px(sx)}" y2="${px(y0)}" stroke="#ddd" stroke-width="0.5"/>`,
      `<line x1="${px(sx)}" y1="${px(y0)}" x2="${px(sx)}" y2="${px(y0 + 4)}" stroke="#333" stroke-width="1"/>`,
      `<text x="${px(sx)}" y="${px(y0 + 16)}" text-anchor="middle" font-size="11">${esc(tickLabel(t))}</text>`,
    );
  }
  if (label) {
    parts.push(
      `<text x="${px(box.x + box.width / 2)}" y="${px(y0 + 32)}" text-anchor="middle" font-size="12">${esc(label)}</text>`,
    );
  }
  return parts.join("\n");
}

/** Left axis with horizontal grid lines across the box. */
export function yAxis(scale: Scale, box: Box, label?: string): string {
  const parts: string[] = [];
  parts.push(
    `<line x1="${px(box.x)}" y1="${px(box.y)}" x2="${px(box.x)}" y2="${px(box.y + box.height)}" stroke="#333" stroke-width="1"/>`,
  );
  for (const t of scale.ticks(5)) {
    const sy = scale(t);
    parts.push(
      `<line x1="${px(box.x)}" y1="${px(sy)}" x2="${px(box.x + box.width)}" y2="${px(sy)}" stroke="#ddd" stroke-width="0.5"/>`,
      `<line x1="${px(box.x - 4)}" y1="${px(sy)}" x2="${px(box.x)}" y2="${px(sy)}" stroke="#333" stroke-width="1"/>`,
      `<text x="${px(box.x - 7)}" y="${px(sy + 3.5)}" text-anchor="end" font-size="11">${esc(tickLabel(t))}</text>`,
    );
  }
  if (label) {
    const cx = box.x - 44;
    const cy = box.y + box.height / 2;
    parts.push(
      `<text x="${px(cx)}" y="${px(cy)}" text-anchor="middle" font-size="12" transform="rotate(-90 ${px(cx)} ${px(cy)})">${esc(label)}</text>`,
    );
  }
  return parts.join("\n");
}

/** Path through (xs, ys) in data space; non-finite points break the line. */
export function seriesPath(
  xs: number[],
  ys: number[],
  sx: Scale,
  sy: Scale,
  stroke: string,
  options: { dashed?: boolean; width?: number } = {},
): string {
  const gen = d3line<number>()
    .defined((i) => Number.isFinite(xs[i]!) && Number.isFinite(ys[i]!))
    .x((i) => Number(px(sx(xs[i]!))))
    .y((i) => Number(px(sy(ys[i]!))));
  const d = gen([...xs.keys()]) ?? "";
  const dash = options.dashed ? ' stroke-dasharray="5,4"' : "";
  const width = options.width ?? 1.5;
  return `<path d="${d}" fill="none" stroke="${stroke}" stroke-width="${width}"${dash}/>`;
}

export function marker(cx: number, cy: number, color: string, shape: "circle" | "square"): string {
  if (shape === "circle") {
    return `<circle cx="${px(cx)}" cy="${px(cy)}" r="3" fill="${color}"/>`;
  }
  return `<rect x="${px(cx - 3)}" y="${px(cy - 3)}" width="6" height="6" fill="${color}"/>`;
}

export function text(
  x: number,
  y: number,
  content: string,
  options: { anchor?: string; size?: number; color?: string; bold?: boolean } = {},
): string {
  const anchor = options.anchor ?? "start";
  const size = options.size ?? 12;
  const color = options.color ?? "#111";
  const weight = options.bold ? ' font-weight="bold"' : "";
  return `<text x="${px(x)}" y="${px(y)}" text-anchor="${anchor}" font-size="${size}" fill="${color}"${weight}>${esc(content)}</text>`;
}

/** Assemble the document; `metadataJson` is embedded verbatim for provenance checks. */
export function svgDocument(
  width: number,
  height: number,
  metadataJson: string,
  body: string,
): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
    `<metadata id="provenance">${esc(metadataJson)}</metadata>`,
    `<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`,
    body,
    `</svg>`,
    ``,
  ].join("\n");
}
