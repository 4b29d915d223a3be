/** The two inference passes: windows -> coherence probabilities, and
 * essays -> restoration labels, each written atomically in the scoring
 * pipeline's JSONL formats. */

import {
  CoherenceBackend,
  PunctBackend,
  packWindow,
  type PackedWindow,
} from "./backends.js";
import { readJsonl, sha256Hex, writeJsonlAtomic } from "./io.js";
import {
  cohPredSchema,
  essaySchema,
  punctLabelsSchema,
  windowSchema,
  type CohPredRecord,
  type PunctLabelsRecord,
} from "./schemas.js";
import { stripEssay } from "./strip.js";

export interface InferReport {
  processed: number;
  skipped: string[];
  truncated: number;
}

function truncate(packed: PackedWindow, maxLength: number): { packed: PackedWindow; cut: boolean } {
  const total = Array.from(packed.text).length + Array.from(packed.textPair ?? "").length;
  if (total <= maxLength) return { packed, cut: false };
  if (packed.textPair === undefined) {
    return { packed: { text: Array.from(packed.text).slice(0, maxLength).join("") }, cut: true };
  }
  const headLen = Array.from(packed.text).length;
  if (headLen >= maxLength) {
    return { packed: { text: Array.from(packed.text).slice(0, maxLength).join("") }, cut: true };
  }
  return {
    packed: {
      text: packed.text,
      textPair: Array.from(packed.textPair).slice(0, maxLength - headLen).join(""),
    },
    cut: true,
  };
}

export async function inferCoherence(
  windowsPath: string,
  outPath: string,
  backend: CoherenceBackend,
  batchSize = 16,
  maxLength = 510
): Promise<InferReport> {
  const windows = readJsonl(windowsPath, windowSchema);
  const packed: PackedWindow[] = [];
  let truncated = 0;
  for (const w of windows) {
    const result = truncate(packWindow(w.sentences), maxLength);
    if (result.cut) truncated += 1;
    packed.push(result.packed);
  }
  const records: CohPredRecord[] = [];
  for (let start = 0; start < packed.length; start += batchSize) {
    const scores = await backend.scoreWindows(packed.slice(start, start + batchSize));
    scores.forEach((p, offset) => {
      const w = windows[start + offset];
      records.push(cohPredSchema.parse({
        essay_id: w.essay_id,
        window_id: w.window_id,
        p_coherent: p,
      }));
    });
  }
  writeJsonlAtomic(outPath, records);
  return { processed: records.length, skipped: [], truncated };
}

export async function inferPunct(
  essaysPath: string,
  outPath: string,
  backend: PunctBackend,
  batchSize = 16
): Promise<InferReport> {
  const essays = readJsonl(essaysPath, essaySchema);
  const records: PunctLabelsRecord[] = [];
  const skipped: string[] = [];
  for (let start = 0; start < essays.length; start += batchSize) {
    const batch = essays.slice(start, start + batchSize);
    const bases = batch.map((e) => stripEssay(e.paragraphs).base);
    let labelsBatch: number[][];
    try {
      labelsBatch = await backend.labelBase(bases);
    } catch (err) {
      // fall back to per-essay calls so one bad essay does not sink the batch
      labelsBatch = [];
      for (const base of bases) {
        try {
          labelsBatch.push((await backend.labelBase([base]))[0]);
        } catch {
          labelsBatch.push([]);
        }
      }
    }
    batch.forEach((essay, offset) => {
      const base = bases[offset];
      const labels = labelsBatch[offset];
      const baseLength = Array.from(base).length;
      if (labels.length !== baseLength && !(labels.length === 0 && baseLength === 0)) {
        skipped.push(essay.id);
        return;
      }
      records.push(punctLabelsSchema.parse({
        essay_id: essay.id,
        base_sha256: sha256Hex(base),
        labels: labels as (0 | 1 | 2)[],
      }));
    });
  }
  writeJsonlAtomic(outPath, records);
  return { processed: records.length, skipped, truncated: 0 };
}
