import { readFileSync } from "node:fs";
import Papa from "papaparse";
import { ContractError } from "./errors.js";

export interface Table {
  /** Column names in file order. */
  columns: string[];
  /** One record per data row; missing/unparsable cells become NaN. */
  rows: Record<string, number>[];
}

/** Parse a harness CSV (plain comma-separated, numeric cells, one header row). */
export function parseCsv(text: string, source: string): Table {
  const parsed = Papa.parse<Record<string, unknown>>(text, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new ContractError(`${source}: malformed CSV (${first.message})`);
  }
  const columns = (parsed.meta.fields ?? []).filter((f) => f.length > 0);
  if (columns.length === 0) {
    throw new ContractError(`${source}: no header row`);
  }
  const rows = parsed.data.map((raw) => {
    const row: Record<string, number> = {};
    for (const name of columns) {
      const cell = raw[name];
      row[name] = typeof cell === "number" ? cell : NaN;
    }
    return row;
  });
  return { columns, rows };
}

export function readCsvFile(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new ContractError(`cannot read ${path}`);
  }
  return parseCsv(text, path);
}

/** Throw, naming the first requested column the table does not have. */
export function requireColumns(table: Table, names: string[], source: string): void {
  for (const name of names) {
    if (!table.columns.includes(name)) {
      throw new ContractError(
        `${source}: missing column "${name}" (have: ${table.columns.join(", ")})`,
      );
    }
  }
}

export function column(table: Table, name: string): number[] {
  return table.rows.map((row) => row[name] ?? NaN);
}
