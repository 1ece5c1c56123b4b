/**
 * Console state: one store owns everything the DOM layer renders.
 *
 * The store never computes plans or geometry; every number it exposes came
 * out of the API. tick() is a single polling pass so tests can drive the
 * loop deterministically; start() just calls it on an interval.
 */

import { ApiClient, ApiError } from "./api.js";
import { clampCursor } from "./jobview.js";
import type {
  GridArtifact,
  InventorySummary,
  Job,
  PlanArtifact,
  ReportArtifact,
  SubmitRequest,
} from "./types.js";

export interface ActivityEntry {
  ts: number;
  text: string;
}

export interface JobArtifacts {
  grid: GridArtifact | null;
  report: ReportArtifact | null;
  plan: PlanArtifact | null;
}

export interface ConsoleState {
  connected: boolean;
  jobs: Job[];
  selectedId: string | null;
  artifacts: JobArtifacts;
  cursor: number;
  inventory: InventorySummary | null;
  /** Newest first; built from actions and observed transitions. */
  activity: ActivityEntry[];
  promptError: string | null;
  lastError: string | null;
  busy: boolean;
}

const EMPTY_ARTIFACTS: JobArtifacts = { grid: null, report: null, plan: null };

type Listener = (state: ConsoleState) => void;

export class ConsoleStore {
  private state: ConsoleState = {
    connected: true,
    jobs: [],
    selectedId: null,
    artifacts: EMPTY_ARTIFACTS,
    cursor: 0,
    inventory: null,
    activity: [],
    promptError: null,
    lastError: null,
    busy: false,
  };

  private listeners = new Set<Listener>();
  private cache = new Map<string, JobArtifacts>();
  private timer: ReturnType<typeof setInterval> | null = null;
  private ticking = false;

  constructor(
    private readonly api: ApiClient,
    private readonly now: () => number = () => Date.now(),
  ) {}

  getState(): ConsoleState {
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }

  private patch(partial: Partial<ConsoleState>): void {
    this.state = { ...this.state, ...partial };
    for (const fn of this.listeners) fn(this.state);
  }

  private note(text: string): void {
    const entry = { ts: this.now(), text };
    this.patch({ activity: [entry, ...this.state.activity].slice(0, 100) });
  }

  start(intervalMs = 1000): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.tick(), intervalMs);
    void this.tick();
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  /** One polling pass: job list, inventory, selected job's artifacts. */
  async tick(): Promise<void> {
    if (this.ticking) return;
    this.ticking = true;
    try {
      const jobs = await this.api.listJobs();
      const inventory = await this.api.inventory();
      this.observeTransitions(jobs);
      if (!this.state.connected) {
        this.note("connection restored");
      }
      this.patch({ jobs, inventory, connected: true });
      await this.loadSelectedArtifacts();
    } catch (err) {
      this.fail(err);
    } finally {
      this.ticking = false;
    }
  }

  private observeTransitions(next: Job[]): void {
    const prev = new Map(this.state.jobs.map((j) => [j.id, j.state]));
    for (const job of next) {
      const was = prev.get(job.id);
      if (was !== undefined && was !== job.state) {
        this.note(`${shortId(job.id)}: ${was} -> ${job.state}`);
      }
    }
  }

  private fail(err: unknown): void {
    if (err instanceof ApiError && err.status === 0) {
      if (this.state.connected) this.note("connection lost");
      this.patch({ connected: false });
    } else {
      this.patch({ lastError: err instanceof Error ? err.message : String(err) });
    }
  }

  selected(): Job | null {
    return this.state.jobs.find((j) => j.id === this.state.selectedId) ?? null;
  }

  select(id: string | null): void {
    if (id === this.state.selectedId) return;
    this.patch({
      selectedId: id,
      artifacts: (id !== null && this.cache.get(id)) || EMPTY_ARTIFACTS,
      cursor: 0,
    });
    void this.loadSelectedArtifacts();
  }

  private loading: Promise<void> = Promise.resolve();

  /** Serialized so overlapping calls reuse the cache instead of refetching. */
  private loadSelectedArtifacts(): Promise<void> {
    this.loading = this.loading.then(() => this.fetchMissingArtifacts());
    return this.loading;
  }

  private async fetchMissingArtifacts(): Promise<void> {
    const job = this.selected();
    if (job === null) return;
    let cached = this.cache.get(job.id);
    if (cached === undefined) {
      cached = { ...EMPTY_ARTIFACTS };
      this.cache.set(job.id, cached);
    }
    try {
      if (cached.grid === null && "grid" in job.artifacts) {
        cached.grid = await this.api.gridArtifact(job);
      }
      if (cached.report === null && "report" in job.artifacts) {
        cached.report = await this.api.reportArtifact(job);
      }
      if (cached.plan === null && "plan" in job.artifacts) {
        cached.plan = await this.api.planArtifact(job);
      }
    } catch (err) {
      this.fail(err);
    }
    if (this.state.selectedId === job.id) {
      this.patch({ artifacts: cached });
    }
  }

  /** Inline validation happens here; an invalid form sends no request. */
  async submit(form: {
    prompt: string;
    seed?: number;
    heightCells?: number;
    maxCells?: number;
  }): Promise<Job | null> {
    const prompt = form.prompt.trim();
    if (prompt === "") {
      this.patch({ promptError: "prompt must not be empty" });
      return null;
    }
    if (form.heightCells !== undefined && form.maxCells !== undefined) {
      this.patch({
        promptError: "set either a target height or a cell budget, not both",
      });
      return null;
    }
    this.patch({ promptError: null, busy: true });
    try {
      const req: SubmitRequest = { prompt };
      if (form.seed !== undefined) req.seed = form.seed;
      if (form.heightCells !== undefined) req.height_cells = form.heightCells;
      if (form.maxCells !== undefined) req.max_cells = form.maxCells;
      const job = await this.api.submitJob(req);
      this.note(`submitted "${prompt}" as ${shortId(job.id)}`);
      this.patch({ jobs: [...this.state.jobs, job] });
      this.select(job.id);
      return job;
    } catch (err) {
      this.fail(err);
      return null;
    } finally {
      this.patch({ busy: false });
    }
  }

  async approve(): Promise<void> {
    await this.act("approve", (id) => this.api.approve(id), "approved");
  }

  async disassemble(): Promise<void> {
    await this.act(
      "disassemble",
      (id) => this.api.disassemble(id),
      "disassembly requested for",
    );
  }

  private async act(
    label: string,
    call: (id: string) => Promise<Job>,
    noteVerb: string,
  ): Promise<void> {
    const job = this.selected();
    if (job === null) {
      this.patch({ lastError: `no job selected to ${label}` });
      return;
    }
    this.patch({ busy: true, lastError: null });
    try {
      const updated = await call(job.id);
      this.note(`${noteVerb} ${shortId(updated.id)}`);
      this.patch({
        jobs: this.state.jobs.map((j) => (j.id === updated.id ? updated : j)),
      });
    } catch (err) {
      this.fail(err);
    } finally {
      this.patch({ busy: false });
    }
  }

  setCursor(cursor: number): void {
    this.patch({ cursor: clampCursor(this.state.artifacts.plan, cursor) });
  }

  dismissError(): void {
    this.patch({ lastError: null });
  }
}

function shortId(id: string): string {
  return id.slice(0, 8);
}
