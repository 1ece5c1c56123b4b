/**
 * Typed mirrors of the service's documented JSON payloads.
 *
 * Everything the console renders is parsed through these schemas, so a
 * contract drift on the API side fails loudly instead of painting NaN.
 */

import { z } from "zod";

export const JOB_STATES = [
  "pending",
  "generated",
  "voxelized",
  "checked",
  "planned",
  "awaiting_approval",
  "simulating",
  "done",
  "failed",
] as const;

export type JobState = (typeof JOB_STATES)[number];

/** Pipeline stages shown as the progress track, in order. */
export const PIPELINE_STAGES: readonly JobState[] = [
  "pending",
  "generated",
  "voxelized",
  "checked",
  "planned",
  "awaiting_approval",
];

export const cellSchema = z.tuple([z.number(), z.number(), z.number()]);
export type Cell = z.infer<typeof cellSchema>;

export const verdictSchema = z.object({
  matches: z.boolean(),
  score: z.number().min(0).max(1),
  rationale: z.string(),
});
export type Verdict = z.infer<typeof verdictSchema>;

export const jobSchema = z.object({
  id: z.string(),
  prompt: z.string(),
  seed: z.number().int(),
  state: z.enum(JOB_STATES),
  error: z.string().nullable(),
  created: z.number(),
  updated: z.number(),
  components: z.number().int().nonnegative(),
  released: z.boolean(),
  sim_step: z.number().int().nonnegative(),
  sim_total: z.number().int().nonnegative(),
  duration_estimate: z.number().nullable(),
  verdict: verdictSchema.nullable(),
  options: z.record(z.unknown()),
  history: z.array(z.object({ state: z.string(), ts: z.number() })),
  artifacts: z.record(z.string()),
});
export type Job = z.infer<typeof jobSchema>;

export const jobListSchema = z.object({ jobs: z.array(jobSchema) });

export const inventorySchema = z.object({
  total: z.number().int().nonnegative(),
  free: z.number().int().nonnegative(),
  allocations: z.record(z.number().int().nonnegative()),
});
export type InventorySummary = z.infer<typeof inventorySchema>;

export const gridSchema = z.object({
  origin: z.array(z.number()).length(3),
  cell_size: z.array(z.number()).length(3),
  dims: cellSchema,
  occupied: z.array(cellSchema),
});
export type GridArtifact = z.infer<typeof gridSchema>;

export const reportSchema = z.object({
  component_sizes: z.array(z.number().int()),
  grounded_component: z.number().int().nullable(),
  pruned_cells: z.array(cellSchema),
  overhang_violations: z.array(
    z.object({ cell: cellSchema, cantilever: z.number().int().nullable() }),
  ),
  feasible: z.boolean(),
});
export type ReportArtifact = z.infer<typeof reportSchema>;

// Only the fields the console displays; waypoints stay opaque.
export const planSchema = z.object({
  version: z.literal(1),
  estimated_duration: z.number().nonnegative(),
  grid: gridSchema,
  steps: z.array(
    z.object({
      cell: cellSchema,
      component_id: z.string(),
      approach_dir: z.enum(["+z", "+x", "-x", "+y", "-y"]),
      waypoints: z.array(z.unknown()),
      leg_times: z.array(z.number()),
    }),
  ),
});
export type PlanArtifact = z.infer<typeof planSchema>;

export const healthSchema = z.object({
  status: z.string(),
  jobs: z.number().int(),
});

export interface SubmitRequest {
  prompt?: string;
  audio_b64?: string;
  seed?: number;
  height_cells?: number;
  max_cells?: number;
}
