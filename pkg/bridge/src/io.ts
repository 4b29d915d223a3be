import { createHash } from "node:crypto";
import * as fs from "node:fs";
import * as path from "node:path";
import type { ZodType } from "zod";

export function sha256Hex(text: string): string {
  return createHash("sha256").update(Buffer.from(text, "utf8")).digest("hex");
}

export function readJsonl<T>(filePath: string, schema: ZodType<T>): T[] {
  const records: T[] = [];
  const raw = fs.readFileSync(filePath, "utf8");
  raw.split("\n").forEach((line, index) => {
    if (line.trim() === "") return;
    let parsed: unknown;
    try {
      parsed = JSON.parse(line);
    } catch (err) {
      throw new Error(`${filePath}:${index + 1}: invalid JSON`);
    }
    const result = schema.safeParse(parsed);
    if (!result.success) {
      throw new Error(`${filePath}:${index + 1}: ${result.error.issues[0]?.message}`);
    }
    records.push(result.data);
  });
  return records;
}

/** Write a temp file in the destination directory, then rename into place. */
export function writeJsonlAtomic(filePath: string, records: unknown[]): void {
  const dir = path.dirname(filePath);
  const tmp = path.join(dir, `.${path.basename(filePath)}.tmp-${process.pid}`);
  const body = records.map((r) => JSON.stringify(r)).join("\n");
  fs.writeFileSync(tmp, records.length > 0 ? body + "\n" : "", "utf8");
  fs.renameSync(tmp, filePath);
}
