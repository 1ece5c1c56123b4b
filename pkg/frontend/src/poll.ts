/** Small async polling helpers shared by the store and the scripted tests. */

import type { ApiClient } from "./api.js";
import type { Job, JobState } from "./types.js";

export const REST_STATES: readonly JobState[] = [
  "awaiting_approval",
  "done",
  "failed",
];

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export interface WatchOptions {
  intervalMs?: number;
  timeoutMs?: number;
  until?: (job: Job) => boolean;
  onUpdate?: (job: Job) => void;
}

/**
 * Poll one job until it reaches a rest state (or a custom predicate).
 * Rejects with the job's error message if it lands in "failed" while
 * waiting for something else.
 */
export async function watchJob(
  api: ApiClient,
  id: string,
  opts: WatchOptions = {},
): Promise<Job> {
  const interval = opts.intervalMs ?? 1000;
  const deadline = Date.now() + (opts.timeoutMs ?? 120_000);
  const until =
    opts.until ?? ((job: Job) => REST_STATES.includes(job.state));
  for (;;) {
    const job = await api.getJob(id);
    opts.onUpdate?.(job);
    if (until(job)) return job;
    if (job.state === "failed") {
      throw new Error(`job failed: ${job.error ?? "unknown"}`);
    }
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for job ${id} (state ${job.state})`);
    }
    await sleep(interval);
  }
}
