/**
 * Thin fetch client for the assembly service.
 *
 * The fetch function is injectable so unit tests can run without a network
 * and the integration test can point at a live server.
 */

import {
  gridSchema,
  healthSchema,
  inventorySchema,
  jobListSchema,
  jobSchema,
  planSchema,
  reportSchema,
  type GridArtifact,
  type InventorySummary,
  type Job,
  type PlanArtifact,
  type ReportArtifact,
  type SubmitRequest,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

/** status 0 means the request never reached the server. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(status === 0 ? `connection failed: ${detail}` : `${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, err instanceof Error ? err.message : String(err));
    }
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = (await resp.json()) as { detail?: unknown };
        if (typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return resp;
  }

  private async getJson(path: string): Promise<unknown> {
    return (await this.request(path)).json();
  }

  private async postJson(path: string, body?: unknown): Promise<unknown> {
    const init: RequestInit = { method: "POST" };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    return (await this.request(path, init)).json();
  }

  async health(): Promise<{ status: string; jobs: number }> {
    return healthSchema.parse(await this.getJson("/healthz"));
  }

  async listJobs(): Promise<Job[]> {
    return jobListSchema.parse(await this.getJson("/jobs")).jobs;
  }

  async getJob(id: string): Promise<Job> {
    return jobSchema.parse(await this.getJson(`/jobs/${id}`));
  }

  async submitJob(req: SubmitRequest): Promise<Job> {
    return jobSchema.parse(await this.postJson("/jobs", req));
  }

  async approve(id: string): Promise<Job> {
    return jobSchema.parse(await this.postJson(`/jobs/${id}/approve`));
  }

  async disassemble(id: string): Promise<Job> {
    return jobSchema.parse(await this.postJson(`/jobs/${id}/disassemble`));
  }

  async inventory(): Promise<InventorySummary> {
    return inventorySchema.parse(await this.getJson("/inventory"));
  }

  /** Resolve a job's artifact link (as reported by the API) to a full URL. */
  artifactUrl(job: Job, name: string): string | null {
    const path = job.artifacts[name];
    return path === undefined ? null : this.baseUrl + path;
  }

  private async artifactJson(job: Job, name: string): Promise<unknown> {
    const path = job.artifacts[name];
    if (path === undefined) {
      throw new ApiError(404, `job has no ${name} artifact yet`);
    }
    return this.getJson(path);
  }

  async gridArtifact(job: Job): Promise<GridArtifact> {
    return gridSchema.parse(await this.artifactJson(job, "grid"));
  }

  async reportArtifact(job: Job): Promise<ReportArtifact> {
    return reportSchema.parse(await this.artifactJson(job, "report"));
  }

  async planArtifact(job: Job): Promise<PlanArtifact> {
    return planSchema.parse(await this.artifactJson(job, "plan"));
  }
}
