export {
  buildProvenance,
  extractProvenance,
  sha256File,
  verifyFigure,
} from "../src/index.js";
import { svgDocument } from "../src/svg.js";

/** Minimal valid figure wrapping the given provenance JSON. */
export function svgDocumentForTest(metadataJson: string): string {
  return svgDocument(100, 100, metadataJson, "");
}
