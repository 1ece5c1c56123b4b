/**
 * Pure derivation of display state from job records and artifacts.
 *
 * Nothing here computes geometry or plans; it rearranges what the service
 * already said into shapes the renderer and DOM layer can consume directly.
 */

import {
  PIPELINE_STAGES,
  type Cell,
  type GridArtifact,
  type Job,
  type JobState,
  type PlanArtifact,
  type ReportArtifact,
} from "./types.js";

export interface StageView {
  state: JobState;
  reached: boolean;
  at: number | null;
}

/** Progress track: each pipeline stage with the timestamp it was reached. */
export function stageProgress(job: Job): StageView[] {
  const seen = new Map<string, number>();
  for (const entry of job.history) {
    if (!seen.has(entry.state)) seen.set(entry.state, entry.ts);
  }
  return PIPELINE_STAGES.map((state) => ({
    state,
    reached: seen.has(state),
    at: seen.get(state) ?? null,
  }));
}

export function canApprove(job: Job): boolean {
  return job.state === "awaiting_approval";
}

export function canDisassemble(job: Job): boolean {
  return job.state === "done" && !job.released;
}

export interface Badge {
  label: string;
  tone: "busy" | "action" | "ok" | "error";
}

export function stateBadge(job: Job): Badge {
  switch (job.state) {
    case "awaiting_approval":
      return { label: "awaiting approval", tone: "action" };
    case "done":
      return { label: job.released ? "done (released)" : "done", tone: "ok" };
    case "failed":
      return { label: `failed: ${job.error ?? "unknown"}`, tone: "error" };
    case "simulating":
      return {
        label: `simulating ${job.sim_step}/${job.sim_total}`,
        tone: "busy",
      };
    default:
      return { label: job.state, tone: "busy" };
  }
}

export type CellRole = "placed" | "pending" | "pruned" | "violation";

export interface SceneCell {
  cell: Cell;
  role: CellRole;
  /** 1-based plan step for placed/pending cells, null otherwise. */
  step: number | null;
}

export interface VoxelScene {
  dims: Cell;
  cells: SceneCell[];
}

const key = (c: Cell) => `${c[0]},${c[1]},${c[2]}`;

export function clampCursor(plan: PlanArtifact | null, cursor: number): number {
  const n = plan === null ? 0 : plan.steps.length;
  return Math.max(0, Math.min(n, Math.floor(cursor)));
}

/**
 * Build the draw list for the voxel view.
 *
 * With a plan and cursor k, the placed cells are exactly the first k steps
 * in the plan's own order; the rest of the plan is pending. Cells the
 * feasibility check pruned render as ghosts and overhang violations are
 * flagged on top of whatever role the cell had.
 */
export function buildScene(
  grid: GridArtifact,
  report: ReportArtifact | null,
  plan: PlanArtifact | null,
  cursor: number,
): VoxelScene {
  const violations = new Set(
    (report?.overhang_violations ?? []).map((v) => key(v.cell)),
  );
  const cells: SceneCell[] = [];
  const covered = new Set<string>();

  if (plan !== null) {
    const k = clampCursor(plan, cursor);
    plan.steps.forEach((step, i) => {
      const role: CellRole = violations.has(key(step.cell))
        ? "violation"
        : i < k
          ? "placed"
          : "pending";
      cells.push({ cell: step.cell, role, step: i + 1 });
      covered.add(key(step.cell));
    });
  } else {
    for (const cell of grid.occupied) {
      const role: CellRole = violations.has(key(cell)) ? "violation" : "placed";
      cells.push({ cell, role, step: null });
      covered.add(key(cell));
    }
  }

  for (const cell of report?.pruned_cells ?? []) {
    if (!covered.has(key(cell))) {
      cells.push({ cell, role: "pruned", step: null });
    }
  }
  return { dims: grid.dims, cells };
}
