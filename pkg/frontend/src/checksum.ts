import { createHash } from "node:crypto";
import { readFileSync } from "node:fs";
import { basename } from "node:path";
import { ContractError } from "./errors.js";

/** Provenance record embedded in every figure. */
export interface Provenance {
  tool: string;
  command: string;
  inputs: { name: string; sha256: string }[];
}

export const TOOL_NAME = "gkdv-plots";

export function sha256File(path: string): string {
  let bytes: Buffer;
  try {
    bytes = readFileSync(path);
  } catch {
    throw new ContractError(`cannot read ${path}`);
  }
  return createHash("sha256").update(bytes).digest("hex");
}

export function buildProvenance(command: string, inputPaths: string[]): Provenance {
  return {
    tool: TOOL_NAME,
    command,
    inputs: inputPaths.map((p) => ({ name: basename(p), sha256: sha256File(p) })),
  };
}

function unescapeXml(text: string): string {
  return text
    .replaceAll("&quot;", '"')
    .replaceAll("&lt;", "<")
    .replaceAll("&gt;", ">")
    .replaceAll("&amp;", "&");
}

export function extractProvenance(svgText: string, source: string): Provenance {
  const match = svgText.match(/<metadata id="provenance">([\s\S]*?)<\/metadata>/);
  if (!match) {
    throw new ContractError(`${source}: no provenance metadata found`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(unescapeXml(match[1]!));
  } catch {
    throw new ContractError(`${source}: provenance metadata is not valid JSON`);
  }
  const prov = parsed as Provenance;
  if (prov.tool !== TOOL_NAME || !Array.isArray(prov.inputs)) {
    throw new ContractError(`${source}: provenance metadata has unexpected shape`);
  }
  return prov;
}

/**
 * Check that the figure at svgPath was produced by `command` from exactly
 * the files now at `inputPaths` (same basenames, same SHA-256 content).
 */
export function verifyFigure(
  svgPath: string,
  command: string,
  inputPaths: string[],
): { ok: boolean; details: string[] } {
  let svgText: string;
  try {
    svgText = readFileSync(svgPath, "utf8");
  } catch {
    throw new ContractError(`cannot read ${svgPath}`);
  }
  const prov = extractProvenance(svgText, svgPath);
  const details: string[] = [];
  let ok = true;
  if (prov.command !== command) {
    ok = false;
    details.push(`command mismatch: figure was made by "${prov.command}", verifying as "${command}"`);
  }
  if (prov.inputs.length !== inputPaths.length) {
    ok = false;
    details.push(`input count mismatch: figure lists ${prov.inputs.length}, given ${inputPaths.length}`);
  }
  const n = Math.min(prov.inputs.length, inputPaths.length);
  for (let i = 0; i < n; i++) {
    const recorded = prov.inputs[i]!;
    const path = inputPaths[i]!;
    const name = basename(path);
    const digest = sha256File(path);
    if (recorded.name !== name) {
      ok = false;
      details.push(`input ${i}: name mismatch (figure: ${recorded.name}, given: ${name})`);
    } else if (recorded.sha256 !== digest) {
      ok = false;
      details.push(`input ${i} (${name}): checksum mismatch`);
    } else {
      details.push(`input ${i} (${name}): ok`);
    }
  }
  return { ok, details };
}
