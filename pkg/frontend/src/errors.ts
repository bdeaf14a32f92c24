/** Error whose message is meant for the command-line user. */
export class ContractError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ContractError";
  }
}

export const SUPPORTED_SCHEMA_VERSION = 1;

/** Refuse inputs written under a different file-format version. */
export function checkSchemaVersion(version: unknown, source: string): void {
  if (version !== SUPPORTED_SCHEMA_VERSION) {
    throw new ContractError(
      `${source}: schema_version ${String(version)} is not supported ` +
        `(this tool reads schema_version ${SUPPORTED_SCHEMA_VERSION})`,
    );
  }
}
