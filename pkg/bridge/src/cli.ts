#!/usr/bin/env node
/**
 * cohscore-bridge <infer-coherence|infer-punct> [flags]
 *
 *   --in <path>          windows.jsonl (coherence) or essays.jsonl (punct)
 *   --out <path>         coh_preds.jsonl / punct_labels.jsonl to write
 *   --backend <name>     stub | transformers          (default stub)
 *   --model <spec>       stub config JSON, or checkpoint path/id
 *   --batch-size <n>     inference batch size         (default 16)
 *   --device <name>      transformers device          (default cpu)
 *   --max-length <n>     window truncation limit      (default 510)
 */

import { createTransformersBackend, StubBackend } from "./backends.js";
import { inferCoherence, inferPunct } from "./infer.js";

interface Flags {
  [key: string]: string;
}

function parseArgs(argv: string[]): { command: string; flags: Flags } {
  const [command, ...rest] = argv;
  const flags: Flags = {};
  for (let i = 0; i < rest.length; i++) {
    const arg = rest[i];
    if (!arg.startsWith("--")) throw new Error(`unexpected argument: ${arg}`);
    const value = rest[i + 1];
    if (value === undefined || value.startsWith("--")) {
      throw new Error(`flag ${arg} needs a value`);
    }
    flags[arg.slice(2)] = value;
    i++;
  }
  return { command: command ?? "", flags };
}

function usage(): string {
  return (
    "usage: cohscore-bridge <infer-coherence|infer-punct> --in FILE --out FILE " +
    "[--backend stub|transformers] [--model SPEC] [--batch-size N] " +
    "[--device cpu] [--max-length N]"
  );
}

async function buildBackend(flags: Flags) {
  const name = flags["backend"] ?? "stub";
  if (name === "stub") {
    return flags["model"] ? StubBackend.fromFile(flags["model"]) : new StubBackend();
  }
  if (name === "transformers") {
    if (!flags["model"]) throw new Error("--model is required for --backend transformers");
    return createTransformersBackend({
      model: flags["model"],
      device: flags["device"],
      maxLength: flags["max-length"] ? Number(flags["max-length"]) : undefined,
    });
  }
  throw new Error(`unknown backend ${name}`);
}

export async function main(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    console.error(usage());
    return 1;
  }
  const { command, flags } = parsed;
  if (command === "" || command === "--help" || command === "help") {
    console.log(usage());
    return command === "" ? 1 : 0;
  }
  const input = flags["in"];
  const output = flags["out"];
  if (!input || !output) {
    console.error("--in and --out are required");
    return 1;
  }
  const batchSize = flags["batch-size"] ? Number(flags["batch-size"]) : 16;
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    console.error("--batch-size must be a positive integer");
    return 1;
  }
  try {
    const backend = await buildBackend(flags);
    if (command === "infer-coherence") {
      const maxLength = flags["max-length"] ? Number(flags["max-length"]) : 510;
      const report = await inferCoherence(input, output, backend, batchSize, maxLength);
      console.log(`windows=${report.processed} truncated=${report.truncated}`);
      return 0;
    }
    if (command === "infer-punct") {
      const report = await inferPunct(input, output, backend, batchSize);
      for (const id of report.skipped) {
        console.error(`skipped essay ${id}: character alignment failed`);
      }
      console.log(`essays=${report.processed} skipped=${report.skipped.length}`);
      return 0;
    }
    console.error(`unknown command ${command}`);
    console.error(usage());
    return 1;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
