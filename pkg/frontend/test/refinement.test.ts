import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import {
  parseCsv,
  readCsvFile,
  readStudySummary,
  renderRefinement,
} from "../src/index.js";

const fixture = (rel: string) => fileURLToPath(new URL(`./fixtures/${rel}`, import.meta.url));

const META = JSON.stringify({ tool: "gkdv-plots", command: "plot-refinement", inputs: [] });

describe("renderRefinement", () => {
  const table = readCsvFile(fixture("study/study.csv"));
  const summary = readStudySummary(fixture("study/study_summary.json"));

  it("draws both curves and annotates the verdict", () => {
    const svg = renderRefinement({ table, source: "study.csv", summary, metadataJson: META });
    expect(svg).toContain("initial-datum norm");
    expect(svg).toContain("sup smoothing metric");
    expect(svg).toContain(`verdict: ${summary.verdict}`);
    expect(summary.verdict).toBe("pass");
    // One marker per (series, grid size).
    expect([...svg.matchAll(/<circle /g)].length).toBeGreaterThanOrEqual(3);
    expect([...svg.matchAll(/<rect x=/g)].length).toBeGreaterThanOrEqual(3);
  });

  it("annotates the sup-metric spread from the summary", () => {
    const svg = renderRefinement({ table, source: "study.csv", summary, metadataJson: META });
    expect(summary.metric_ratio).not.toBeNull();
    expect(svg).toContain(`sup-metric max/min = ${summary.metric_ratio!.toPrecision(4)}`);
  });

  it("is byte-deterministic", () => {
    const opts = { table, source: "study.csv", summary, metadataJson: META };
    expect(renderRefinement(opts)).toBe(renderRefinement(opts));
  });

  it("refuses a single-row study as insufficient-points", () => {
    const single = parseCsv("N,data_norm,sup_metric,status\n64,10.9,17.0,completed\n", "one.csv");
    expect(() =>
      renderRefinement({ table: single, source: "one.csv", summary, metadataJson: META }),
    ).toThrow(/insufficient-points/);
  });

  it("refuses when CSV and summary disagree on the grid sizes", () => {
    const other = parseCsv(
      "N,data_norm,sup_metric,status\n8,1,1,completed\n16,2,1,completed\n",
      "other.csv",
    );
    expect(() =>
      renderRefinement({ table: other, source: "other.csv", summary, metadataJson: META }),
    ).toThrow(/grid sizes disagree/);
  });

  it("refuses a summary with a different schema_version", () => {
    const dir = mkdtempSync(join(tmpdir(), "gkdv-plots-"));
    const doctored = JSON.parse(readFileSync(fixture("study/study_summary.json"), "utf8"));
    doctored.schema_version = 2;
    const path = join(dir, "study_summary.json");
    writeFileSync(path, JSON.stringify(doctored));
    expect(() => readStudySummary(path)).toThrow(/schema_version 2 is not supported/);
  });
});
