import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  SlotLabel,
  deriveLabels,
  essayText,
  normalizePunct,
  splitSentences,
} from "../src/strip.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const fixturePath = path.resolve(here, "..", "..", "fixtures", "strip_cases.json");

interface StripCase {
  raw: string;
  normalized: string;
  base: string;
  labels: number[];
}

describe("shared stripping fixture", () => {
  const cases = JSON.parse(fs.readFileSync(fixturePath, "utf8")) as StripCase[];

  it("has the full 20-case contract", () => {
    expect(cases).toHaveLength(20);
  });

  for (const [index, c] of cases.entries()) {
    it(`case ${index}: ${JSON.stringify(c.raw).slice(0, 40)}`, () => {
      const normalized = normalizePunct(c.raw);
      expect(normalized).toBe(c.normalized);
      const { base, labels } = deriveLabels(normalized);
      expect(base).toBe(c.base);
      expect(labels).toEqual(c.labels);
    });
  }
});

describe("normalizePunct", () => {
  it("folds widths and deletes other punctuation", () => {
    expect(normalizePunct("你好：世界；再见？")).toBe("你好，世界。再见。");
    expect(normalizePunct("“引号”、顿号……")).toBe("引号顿号");
  });

  it("is idempotent", () => {
    const once = normalizePunct("多标点！！？？混乱。abc, def.");
    expect(normalizePunct(once)).toBe(once);
  });
});

describe("deriveLabels", () => {
  it("labels the worked example", () => {
    const { base, labels } = deriveLabels("有一次我上学要迟到了。闷着头硬闯红灯。");
    expect(base).toBe("有一次我上学要迟到了闷着头硬闯红灯");
    expect(labels[9]).toBe(SlotLabel.Period);
    expect(labels[16]).toBe(SlotLabel.Period);
    expect(labels.filter((l) => l !== SlotLabel.None)).toHaveLength(2);
  });

  it("keeps the first mark of a run", () => {
    expect(deriveLabels("a，。b")).toEqual({ base: "ab", labels: [1, 0] });
  });
});

describe("splitSentences", () => {
  it("splits after each period and keeps the tail", () => {
    expect(splitSentences("春天来了，花开了。我们去郊游")).toEqual([
      "春天来了，花开了。",
      "我们去郊游",
    ]);
  });

  it("drops whitespace-only segments", () => {
    expect(splitSentences("")).toEqual([]);
    expect(splitSentences("  ")).toEqual([]);
  });
});

describe("essayText", () => {
  it("joins paragraphs with no separator", () => {
    expect(essayText(["第一段。", "第二段。"])).toBe("第一段。第二段。");
  });
});
