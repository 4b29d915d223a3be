/**
 * Model backends.
 *
 * The stub backend serves tests and dry runs: it answers from a lookup
 * table keyed by the exact model input, with configurable defaults. The
 * transformers backend drives a real checkpoint through
 * `@huggingface/transformers`; it is loaded lazily so the bridge works in
 * environments without that package installed (checkpoints are always
 * user-supplied, never downloaded here).
 */

import * as fs from "node:fs";
import { SlotLabel } from "./strip.js";

/** Input packing for the coherence classifier. Sentence pairs keep a
 * segment boundary; longer windows are plain concatenation. */
export interface PackedWindow {
  text: string;
  textPair?: string;
}

export function packWindow(sentences: string[]): PackedWindow {
  if (sentences.length === 2) {
    return { text: sentences[0], textPair: sentences[1] };
  }
  return { text: sentences.join("") };
}

export interface CoherenceBackend {
  /** Probability that the packed window reads as coherent, in [0, 1]. */
  scoreWindows(windows: PackedWindow[]): Promise<number[]>;
}

export interface PunctBackend {
  /** One slot label per character of the punctuation-free base text. */
  labelBase(bases: string[]): Promise<SlotLabel[][]>;
}

export interface StubConfig {
  /** Keyed by packed input: `text` or `texttextPair`. */
  coherence?: Record<string, number>;
  /** Keyed by the exact base text. */
  punct?: Record<string, number[]>;
  default_p?: number;
}

export function packedKey(packed: PackedWindow): string {
  return packed.textPair === undefined ? packed.text : `${packed.text}${packed.textPair}`;
}

export class StubBackend implements CoherenceBackend, PunctBackend {
  private readonly config: StubConfig;

  constructor(config: StubConfig = {}) {
    this.config = config;
  }

  static fromFile(path: string): StubBackend {
    return new StubBackend(JSON.parse(fs.readFileSync(path, "utf8")) as StubConfig);
  }

  async scoreWindows(windows: PackedWindow[]): Promise<number[]> {
    const table = this.config.coherence ?? {};
    const fallback = this.config.default_p ?? 0.5;
    return windows.map((w) => {
      const p = table[packedKey(w)] ?? fallback;
      if (p < 0 || p > 1) throw new Error(`stub probability outside [0, 1]: ${p}`);
      return p;
    });
  }

  async labelBase(bases: string[]): Promise<SlotLabel[][]> {
    const table = this.config.punct ?? {};
    return bases.map((base) => {
      const labels = table[base];
      const length = Array.from(base).length;
      if (labels === undefined) return new Array<SlotLabel>(length).fill(SlotLabel.None);
      if (labels.length !== length) {
        throw new Error(`stub labels cover ${labels.length} characters, base has ${length}`);
      }
      return labels.map((v) => v as SlotLabel);
    });
  }
}

export interface TokenPrediction {
  /** Surface form of the model token, already stripped of word-piece markers. */
  text: string;
  label: SlotLabel;
}

/**
 * Project token-level predictions onto characters: a multi-character token
 * gives its label to its last character, earlier characters get NONE.
 * Tokens must tile the base text in order; anything else is an alignment
 * failure.
 */
export function projectTokenLabels(base: string, tokens: TokenPrediction[]): SlotLabel[] {
  const chars = Array.from(base);
  const labels = new Array<SlotLabel>(chars.length).fill(SlotLabel.None);
  let cursor = 0;
  for (const token of tokens) {
    const tokenChars = Array.from(token.text);
    if (tokenChars.length === 0) continue;
    const slice = chars.slice(cursor, cursor + tokenChars.length).join("");
    if (slice !== token.text) {
      throw new Error(
        `token ${JSON.stringify(token.text)} does not align at character ${cursor}`
      );
    }
    cursor += tokenChars.length;
    labels[cursor - 1] = token.label;
  }
  if (cursor !== chars.length) {
    throw new Error(`tokens cover ${cursor} of ${chars.length} characters`);
  }
  return labels;
}

interface TransformersOptions {
  model: string;
  device?: string;
  maxLength?: number;
}

/**
 * Real-model backend. Requires `@huggingface/transformers` to be installed
 * and a local (or cached) checkpoint; neither is bundled with the bridge.
 */
export async function createTransformersBackend(
  options: TransformersOptions
): Promise<CoherenceBackend & PunctBackend> {
  let transformers: any;
  try {
    transformers = await import("@huggingface/transformers" as string);
  } catch {
    throw new Error(
      "backend 'transformers' needs the optional @huggingface/transformers package; " +
        "install it and supply a local checkpoint, or use --backend stub"
    );
  }
  const device = options.device ?? "cpu";
  const maxLength = options.maxLength ?? 510;

  return {
    async scoreWindows(windows: PackedWindow[]): Promise<number[]> {
      const classifier = await transformers.pipeline("text-classification", options.model, {
        device,
      });
      const out: number[] = [];
      for (const w of windows) {
        const input = w.textPair === undefined ? w.text : { text: w.text, text_pair: w.textPair };
        const scores = await classifier(input, { top_k: null });
        const positive = (Array.isArray(scores) ? scores : [scores]).find(
          (s: { label: string }) => /1|coherent|positive/i.test(s.label)
        );
        if (positive === undefined) {
          throw new Error("classifier returned no positive-class score");
        }
        out.push(positive.score);
      }
      return out;
    },

    async labelBase(bases: string[]): Promise<SlotLabel[][]> {
      const tagger = await transformers.pipeline("token-classification", options.model, {
        device,
      });
      const results: SlotLabel[][] = [];
      for (const base of bases) {
        const chars = Array.from(base);
        const labels: SlotLabel[] = [];
        for (let start = 0; start < chars.length || start === 0; start += maxLength) {
          const chunk = chars.slice(start, start + maxLength).join("");
          if (chunk === "" && start > 0) break;
          const tokens = await tagger(chunk, { ignore_labels: [] });
          const predictions: TokenPrediction[] = tokens.map(
            (t: { word: string; entity: string }) => ({
              text: t.word.replace(/^##/, ""),
              label: parseLabel(t.entity),
            })
          );
          labels.push(...projectTokenLabels(chunk, predictions));
        }
        results.push(labels);
      }
      return results;
    },
  };
}

function parseLabel(entity: string): SlotLabel {
  const match = entity.match(/\d+$/);
  const value = match ? Number(match[0]) : 0;
  if (value === 1) return SlotLabel.Comma;
  if (value === 2) return SlotLabel.Period;
  return SlotLabel.None;
}
