/**
 * Punctuation normalization and slot-label derivation.
 *
 * This mirrors, character for character, the stripping rules of the Python
 * scoring pipeline; the shared fixture (fixtures/strip_cases.json at the
 * repository root) pins both sides to the same behavior. The restoration
 * model must see exactly the base text the scorer will hash.
 */

export const COMMA_CHAR = "，"; // ，
export const PERIOD_CHAR = "。"; // 。

export enum SlotLabel {
  None = 0,
  Comma = 1,
  Period = 2,
}

const FOLD_TO_COMMA = new Set(["：", ":", ",", COMMA_CHAR]);
const FOLD_TO_PERIOD = new Set(["；", ";", "？", "?", "！", "!", ".", PERIOD_CHAR]);

// Unicode general category P*, matching the scorer's classification.
const PUNCT_RE = /\p{P}/u;

export function normalizePunct(text: string): string {
  const out: string[] = [];
  for (const ch of text) {
    if (FOLD_TO_COMMA.has(ch)) {
      out.push(COMMA_CHAR);
    } else if (FOLD_TO_PERIOD.has(ch)) {
      out.push(PERIOD_CHAR);
    } else if (PUNCT_RE.test(ch)) {
      continue;
    } else {
      out.push(ch);
    }
  }
  return out.join("");
}

export interface LabeledBase {
  base: string;
  labels: SlotLabel[];
}

/**
 * Strip ，and 。from normalized text; label each remaining character with
 * the mark that followed it. The first mark of a run wins, later marks of
 * the run and marks before the first character are dropped.
 */
export function deriveLabels(text: string): LabeledBase {
  const base: string[] = [];
  const labels: SlotLabel[] = [];
  let inRun = false;
  for (const ch of text) {
    if (ch === COMMA_CHAR || ch === PERIOD_CHAR) {
      if (base.length > 0 && !inRun) {
        labels[labels.length - 1] = ch === COMMA_CHAR ? SlotLabel.Comma : SlotLabel.Period;
      }
      inRun = true;
    } else {
      base.push(ch);
      labels.push(SlotLabel.None);
      inRun = false;
    }
  }
  return { base: base.join(""), labels };
}

/** Sentence boundaries fall after every 。; a trailing unterminated segment
 * is kept; whitespace-only segments are dropped. */
export function splitSentences(text: string): string[] {
  const sentences: string[] = [];
  const chars = Array.from(text);
  let start = 0;
  for (let i = 0; i < chars.length; i++) {
    if (chars[i] === PERIOD_CHAR) {
      sentences.push(chars.slice(start, i + 1).join(""));
      start = i + 1;
    }
  }
  if (start < chars.length) {
    sentences.push(chars.slice(start).join(""));
  }
  return sentences.filter((s) => s.trim().length > 0);
}

/** The essay text the scorer hashes: paragraphs joined with no separator. */
export function essayText(paragraphs: string[]): string {
  return paragraphs.join("");
}

export function stripEssay(paragraphs: string[]): LabeledBase {
  return deriveLabels(normalizePunct(essayText(paragraphs)));
}
