#!/usr/bin/env node
import { existsSync, realpathSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { buildProvenance, verifyFigure } from "./checksum.js";
import { readCsvFile } from "./csv.js";
import { ContractError } from "./errors.js";
import { readRunSummary, readStudySummary } from "./schemas.js";
import { renderRefinement } from "./refinement.js";
import { renderTimeseries } from "./timeseries.js";

interface CommonArgs {
  in: string;
  out: string;
  summary?: string;
  verify: boolean;
}

function siblingSummary(csvPath: string, name: string): string | undefined {
  const candidate = join(dirname(csvPath), name);
  return existsSync(candidate) ? candidate : undefined;
}

function runVerify(command: string, outPath: string, inputPaths: string[]): number {
  const { ok, details } = verifyFigure(outPath, command, inputPaths);
  for (const line of details) console.log(line);
  if (!ok) {
    console.error(`gkdv-plots: ${outPath} was not produced from the named inputs`);
    return 1;
  }
  console.log(`${outPath}: verified`);
  return 0;
}

function cmdTimeseries(argv: CommonArgs & { columns?: string; log?: (string | number)[] }): number {
  const summaryPath = argv.summary ?? siblingSummary(argv.in, "summary.json");
  const inputs = summaryPath ? [argv.in, summaryPath] : [argv.in];
  if (argv.verify) return runVerify("plot-timeseries", argv.out, inputs);

  const table = readCsvFile(argv.in);
  const summary = summaryPath ? readRunSummary(summaryPath) : undefined;
  const columns = argv.columns
    ?.split(",")
    .map((c) => c.trim())
    .filter((c) => c.length > 0);
  const logColumns = (argv.log ?? []).map(String);
  const provenance = buildProvenance("plot-timeseries", inputs);
  const svg = renderTimeseries({
    table,
    source: argv.in,
    columns,
    logColumns,
    summary,
    metadataJson: JSON.stringify(provenance),
  });
  writeFileSync(argv.out, svg);
  console.log(`wrote ${argv.out}`);
  return 0;
}

function cmdRefinement(argv: CommonArgs): number {
  const summaryPath = argv.summary ?? siblingSummary(argv.in, "study_summary.json");
  if (!summaryPath) {
    throw new ContractError(
      `no study summary found next to ${argv.in}; pass --summary explicitly`,
    );
  }
  const inputs = [argv.in, summaryPath];
  if (argv.verify) return runVerify("plot-refinement", argv.out, inputs);

  const table = readCsvFile(argv.in);
  const summary = readStudySummary(summaryPath);
  const provenance = buildProvenance("plot-refinement", inputs);
  const svg = renderRefinement({
    table,
    source: argv.in,
    summary,
    metadataJson: JSON.stringify(provenance),
  });
  writeFileSync(argv.out, svg);
  console.log(`wrote ${argv.out}`);
  return 0;
}

export function main(args: string[]): Promise<number> {
  return new Promise((resolve) => {
    let code = 0;
    const wrap = (fn: () => number) => {
      try {
        code = fn();
      } catch (err) {
        if (err instanceof ContractError) {
          console.error(`gkdv-plots: ${err.message}`);
          code = 1;
        } else {
          throw err;
        }
      }
    };
    yargs(args)
      .scriptName("gkdv-plots")
      .usage("$0 <command> --in FILE --out FILE [options]")
      .command(
        "plot-timeseries",
        "one panel per CSV column against time",
        (y) =>
          y
            .option("in", { type: "string", demandOption: true, describe: "run.csv from `gkdv simulate`" })
            .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
            .option("columns", { type: "string", describe: "comma-separated columns (default: all)" })
            .option("log", { type: "array", default: [], describe: "column(s) drawn with a log y-axis" })
            .option("summary", { type: "string", describe: "summary.json (default: sibling of --in)" })
            .option("verify", { type: "boolean", default: false, describe: "check an existing figure's input checksums instead of drawing" }),
        (argv) => wrap(() => cmdTimeseries(argv as unknown as CommonArgs & { columns?: string; log?: (string | number)[] })),
      )
      .command(
        "plot-refinement",
        "data norm and sup smoothing metric against grid size",
        (y) =>
          y
            .option("in", { type: "string", demandOption: true, describe: "study.csv from `gkdv smoothing-study`" })
            .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
            .option("summary", { type: "string", describe: "study_summary.json (default: sibling of --in)" })
            .option("verify", { type: "boolean", default: false, describe: "check an existing figure's input checksums instead of drawing" }),
        (argv) => wrap(() => cmdRefinement(argv as unknown as CommonArgs)),
      )
      .demandCommand(1, "specify a command: plot-timeseries or plot-refinement")
      .strict()
      .parseAsync()
      .then(() => resolve(code));
  });
}

function invokedDirectly(): boolean {
  const entry = process.argv[1];
  if (!entry) return false;
  try {
    return import.meta.url === pathToFileURL(realpathSync(entry)).href;
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
