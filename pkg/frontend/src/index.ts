export { ContractError, checkSchemaVersion, SUPPORTED_SCHEMA_VERSION } from "./errors.js";
export { parseCsv, readCsvFile, requireColumns, column, type Table } from "./csv.js";
export {
  readRunSummary,
  readStudySummary,
  type RunSummary,
  type StudySummary,
} from "./schemas.js";
export {
  buildProvenance,
  extractProvenance,
  sha256File,
  verifyFigure,
  TOOL_NAME,
  type Provenance,
} from "./checksum.js";
export { renderTimeseries, decayAnnotation, type TimeseriesOptions } from "./timeseries.js";
export { renderRefinement, type RefinementOptions } from "./refinement.js";
export { main } from "./cli.js";
