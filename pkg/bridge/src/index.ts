export {
  COMMA_CHAR,
  PERIOD_CHAR,
  SlotLabel,
  deriveLabels,
  essayText,
  normalizePunct,
  splitSentences,
  stripEssay,
} from "./strip.js";
export {
  StubBackend,
  createTransformersBackend,
  packWindow,
  packedKey,
  projectTokenLabels,
} from "./backends.js";
export type {
  CoherenceBackend,
  PackedWindow,
  PunctBackend,
  StubConfig,
  TokenPrediction,
} from "./backends.js";
export { inferCoherence, inferPunct } from "./infer.js";
export type { InferReport } from "./infer.js";
export {
  cohPredSchema,
  essaySchema,
  punctLabelsSchema,
  windowSchema,
} from "./schemas.js";
export { readJsonl, sha256Hex, writeJsonlAtomic } from "./io.js";
