/** Shared fakes: canned records and an in-memory fetch. */

import type {
  GridArtifact,
  Job,
  PlanArtifact,
  ReportArtifact,
} from "../src/types.js";
import type { FetchLike } from "../src/api.js";

export function makeJob(overrides: Partial<Job> = {}): Job {
  return {
    id: "aaaabbbb-0000-1111-2222-333344445555",
    prompt: "a simple stool",
    seed: 0,
    state: "awaiting_approval",
    error: null,
    created: 1000.0,
    updated: 1010.0,
    components: 3,
    released: false,
    sim_step: 0,
    sim_total: 3,
    duration_estimate: 21.5,
    verdict: { matches: true, score: 0.9, rationale: "looks right" },
    options: {},
    history: [
      { state: "pending", ts: 1000.0 },
      { state: "generated", ts: 1001.0 },
      { state: "voxelized", ts: 1002.0 },
      { state: "checked", ts: 1003.0 },
      { state: "planned", ts: 1004.0 },
      { state: "awaiting_approval", ts: 1005.0 },
    ],
    artifacts: {
      mesh: "/jobs/aaaabbbb/artifacts/mesh.stl",
      grid: "/jobs/aaaabbbb/artifacts/grid.json",
      report: "/jobs/aaaabbbb/artifacts/report.json",
      plan: "/jobs/aaaabbbb/artifacts/plan.json",
      render: "/jobs/aaaabbbb/artifacts/render.png",
      verdict: "/jobs/aaaabbbb/artifacts/verdict.json",
    },
    ...overrides,
  };
}

export const sampleGrid: GridArtifact = {
  origin: [0, 0, 0],
  cell_size: [0.05, 0.05, 0.05],
  dims: [2, 1, 2],
  occupied: [
    [0, 0, 0],
    [1, 0, 0],
    [0, 0, 1],
  ],
};

export const sampleReport: ReportArtifact = {
  component_sizes: [3, 1],
  grounded_component: 0,
  pruned_cells: [[1, 0, 1]],
  overhang_violations: [],
  feasible: true,
};

const step = (cell: [number, number, number]) => ({
  cell,
  component_id: `C${cell.join("")}`,
  approach_dir: "+z" as const,
  waypoints: [{}, {}, {}, {}],
  leg_times: [1.0, 1.0, 1.0],
});

export const samplePlan: PlanArtifact = {
  version: 1,
  estimated_duration: 21.5,
  grid: sampleGrid,
  steps: [step([0, 0, 0]), step([1, 0, 0]), step([0, 0, 1])],
};

export interface Recorded {
  path: string;
  method: string;
  body: unknown;
}

export type Route = (body: unknown) => { status?: number; json: unknown };

/** Routes keyed as "METHOD /path". Records every call it serves. */
export function fakeFetch(routes: Record<string, Route>): {
  fetch: FetchLike;
  calls: Recorded[];
} {
  const calls: Recorded[] = [];
  const fetch: FetchLike = (input, init) => {
    const method = init?.method ?? "GET";
    const body =
      typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
    calls.push({ path: input, method, body });
    const route = routes[`${method} ${input}`];
    if (route === undefined) {
      return Promise.resolve(
        new Response(JSON.stringify({ detail: `no route ${method} ${input}` }), {
          status: 404,
          headers: { "content-type": "application/json" },
        }),
      );
    }
    const { status = 200, json } = route(body);
    return Promise.resolve(
      new Response(JSON.stringify(json), {
        status,
        headers: { "content-type": "application/json" },
      }),
    );
  };
  return { fetch, calls };
}
