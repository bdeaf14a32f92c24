import { readFileSync } from "node:fs";
import { z } from "zod";
import { ContractError, checkSchemaVersion } from "./errors.js";

// Harness JSON summaries; non-finite floats are serialized as null.
const finite = z.number();
const maybe = z.number().nullable();

export const DecayFitSchema = z
  .object({
    rate: finite,
    intercept: finite,
    rms_residual: finite,
    n_points: z.number().int(),
    window: z.tuple([finite, finite]),
  })
  .nullable();

export const RunSummarySchema = z
  .object({
    schema_version: z.number(),
    command: z.string(),
    run_id: z.string(),
    status: z.string(),
    decay_fit: DecayFitSchema.optional().default(null),
  })
  .passthrough();

export type RunSummary = z.infer<typeof RunSummarySchema>;

export const StudyRowSchema = z
  .object({
    N: z.number().int(),
    data_norm: maybe,
    sup_metric: maybe,
    status: z.string(),
  })
  .passthrough();

export const StudySummarySchema = z
  .object({
    schema_version: z.number(),
    command: z.string(),
    run_id: z.string(),
    rows: z.array(StudyRowSchema),
    metric_ratio: maybe,
    verdict: z.enum(["pass", "fail", "insufficient-points"]),
  })
  .passthrough();

export type StudySummary = z.infer<typeof StudySummarySchema>;

function readJson(path: string): unknown {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new ContractError(`cannot read ${path}`);
  }
  try {
    return JSON.parse(text);
  } catch {
    throw new ContractError(`${path}: not valid JSON`);
  }
}

function parseWith<S extends z.ZodTypeAny>(schema: S, value: unknown, source: string): z.output<S> {
  const result = schema.safeParse(value);
  if (!result.success) {
    const issue = result.error.issues[0];
    const where = issue && issue.path.length > 0 ? ` at ${issue.path.join(".")}` : "";
    throw new ContractError(`${source}: unexpected shape${where} (${issue?.message ?? "invalid"})`);
  }
  return result.data;
}

export function readRunSummary(path: string): RunSummary {
  const raw = readJson(path);
  if (typeof raw !== "object" || raw === null) {
    throw new ContractError(`${path}: expected a JSON object`);
  }
  checkSchemaVersion((raw as Record<string, unknown>).schema_version, path);
  return parseWith(RunSummarySchema, raw, path);
}

export function readStudySummary(path: string): StudySummary {
  const raw = readJson(path);
  if (typeof raw !== "object" || raw === null) {
    throw new ContractError(`${path}: expected a JSON object`);
  }
  checkSchemaVersion((raw as Record<string, unknown>).schema_version, path);
  return parseWith(StudySummarySchema, raw, path);
}
