/**
 * DOM bootstrap. Everything interesting lives in the store and the pure
 * view modules; this file only wires events and repaints on state change.
 */

import { ApiClient } from "./api.js";
import {
  buildScene,
  canApprove,
  canDisassemble,
  stageProgress,
  stateBadge,
} from "./jobview.js";
import { draw } from "./isoview.js";
import { ConsoleStore, type ConsoleState } from "./store.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function fmtTime(ts: number): string {
  return new Date(ts * 1000).toLocaleTimeString();
}

export function mount(): ConsoleStore {
  // Same origin by default; ?api=http://host:port points elsewhere.
  const base = new URLSearchParams(window.location.search).get("api") ?? "";
  const api = new ApiClient(base);
  const store = new ConsoleStore(api);

  const promptInput = el<HTMLInputElement>("prompt");
  const seedInput = el<HTMLInputElement>("seed");
  const heightInput = el<HTMLInputElement>("height-cells");
  const maxInput = el<HTMLInputElement>("max-cells");
  const promptError = el<HTMLElement>("prompt-error");
  const submitBtn = el<HTMLButtonElement>("submit");
  const jobList = el<HTMLElement>("job-list");
  const stageTrack = el<HTMLElement>("stage-track");
  const badge = el<HTMLElement>("state-badge");
  const canvas = el<HTMLCanvasElement>("voxel-view");
  const slider = el<HTMLInputElement>("step-slider");
  const stepLabel = el<HTMLElement>("step-label");
  const approveBtn = el<HTMLButtonElement>("approve");
  const disassembleBtn = el<HTMLButtonElement>("disassemble");
  const inventoryBox = el<HTMLElement>("inventory");
  const activityList = el<HTMLElement>("activity");
  const offlineBanner = el<HTMLElement>("offline-banner");
  const errorBanner = el<HTMLElement>("error-banner");

  const intOrUndef = (node: HTMLInputElement): number | undefined =>
    node.value.trim() === "" ? undefined : Number(node.value);

  submitBtn.addEventListener("click", () => {
    const form: Parameters<ConsoleStore["submit"]>[0] = {
      prompt: promptInput.value,
    };
    const seed = intOrUndef(seedInput);
    const height = intOrUndef(heightInput);
    const max = intOrUndef(maxInput);
    if (seed !== undefined) form.seed = seed;
    if (height !== undefined) form.heightCells = height;
    if (max !== undefined) form.maxCells = max;
    void store.submit(form);
  });

  slider.addEventListener("input", () => store.setCursor(Number(slider.value)));
  approveBtn.addEventListener("click", () => void store.approve());
  disassembleBtn.addEventListener("click", () => void store.disassemble());
  errorBanner.addEventListener("click", () => store.dismissError());

  function render(state: ConsoleState): void {
    offlineBanner.hidden = state.connected;
    errorBanner.hidden = state.lastError === null;
    errorBanner.textContent = state.lastError ?? "";
    promptError.hidden = state.promptError === null;
    promptError.textContent = state.promptError ?? "";
    submitBtn.disabled = state.busy;

    jobList.replaceChildren(
      ...[...state.jobs].reverse().map((job) => {
        const li = document.createElement("li");
        li.textContent = `${job.prompt} [${stateBadge(job).label}]`;
        li.className = job.id === state.selectedId ? "selected" : "";
        li.addEventListener("click", () => store.select(job.id));
        return li;
      }),
    );

    const job = state.jobs.find((j) => j.id === state.selectedId) ?? null;
    approveBtn.disabled = job === null || !canApprove(job) || state.busy;
    disassembleBtn.disabled = job === null || !canDisassemble(job) || state.busy;

    if (job === null) {
      badge.textContent = "no job selected";
      badge.dataset["tone"] = "";
      stageTrack.replaceChildren();
    } else {
      const b = stateBadge(job);
      badge.textContent = b.label;
      badge.dataset["tone"] = b.tone;
      stageTrack.replaceChildren(
        ...stageProgress(job).map((stage) => {
          const li = document.createElement("li");
          li.textContent = stage.reached
            ? `${stage.state} @ ${fmtTime(stage.at ?? 0)}`
            : stage.state;
          li.className = stage.reached ? "reached" : "";
          return li;
        }),
      );
    }

    const { grid, report, plan } = state.artifacts;
    const steps = plan?.steps.length ?? 0;
    slider.max = String(steps);
    slider.value = String(state.cursor);
    slider.disabled = plan === null;
    stepLabel.textContent =
      plan === null ? "no plan yet" : `step ${state.cursor} / ${steps}`;
    const ctx = canvas.getContext("2d");
    if (ctx !== null) {
      if (grid !== null) {
        draw(ctx, buildScene(grid, report, plan, state.cursor), {
          width: canvas.width,
          height: canvas.height,
          margin: 16,
        });
      } else {
        ctx.clearRect(0, 0, canvas.width, canvas.height);
      }
    }

    if (state.inventory !== null) {
      const inv = state.inventory;
      const rows = Object.entries(inv.allocations)
        .map(([id, n]) => `<tr><td>${id.slice(0, 8)}</td><td>${n}</td></tr>`)
        .join("");
      inventoryBox.innerHTML =
        `<p>free <strong>${inv.free}</strong> of ${inv.total}</p>` +
        (rows ? `<table><tbody>${rows}</tbody></table>` : "<p>no allocations</p>");
    }

    activityList.replaceChildren(
      ...state.activity.map((entry) => {
        const li = document.createElement("li");
        li.textContent = `${fmtTime(entry.ts / 1000)} ${entry.text}`;
        return li;
      }),
    );
  }

  store.subscribe(render);
  render(store.getState());
  store.start(1000);
  return store;
}

mount();
