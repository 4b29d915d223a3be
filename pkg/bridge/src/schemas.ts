/** Zod schemas for every JSONL record the bridge consumes or produces. */

import { z } from "zod";

export const essaySchema = z.object({
  id: z.string().min(1),
  title: z.string().nullable().optional(),
  paragraphs: z.array(z.string().min(1)),
  level: z.union([z.literal(0), z.literal(1), z.literal(2)]).nullable().optional(),
});
export type EssayRecord = z.infer<typeof essaySchema>;

export const windowSchema = z.object({
  essay_id: z.string().min(1),
  window_id: z.number().int().nonnegative(),
  sentences: z.array(z.string()).min(1),
});
export type WindowRecord = z.infer<typeof windowSchema>;

export const cohPredSchema = z.object({
  essay_id: z.string().min(1),
  window_id: z.number().int().nonnegative(),
  p_coherent: z.number().min(0).max(1),
});
export type CohPredRecord = z.infer<typeof cohPredSchema>;

export const punctLabelsSchema = z.object({
  essay_id: z.string().min(1),
  base_sha256: z.string().regex(/^[0-9a-f]{64}$/),
  labels: z.array(z.union([z.literal(0), z.literal(1), z.literal(2)])),
});
export type PunctLabelsRecord = z.infer<typeof punctLabelsSchema>;
