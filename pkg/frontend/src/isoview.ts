/**
 * Canvas isometric voxel painter.
 *
 * Projection and paint order are split out as pure functions so they can be
 * tested without a canvas; draw() only replays their output.
 */

import type { Cell } from "./types.js";
import type { CellRole, VoxelScene } from "./jobview.js";

export interface IsoOptions {
  width: number;
  height: number;
  margin: number;
}

const FILL: Record<CellRole, string> = {
  placed: "#4a7ab5",
  pending: "#d7dde6",
  pruned: "#c8a165",
  violation: "#c0504d",
};

/** Screen position of a cell's top-front vertex, before centering. */
export function project(cell: Cell, unit: number): { x: number; y: number } {
  const [i, j, k] = cell;
  return {
    x: (i - j) * unit,
    y: ((i + j) / 2) * unit - k * unit,
  };
}

/** Painter's order: far cells first so near cubes overdraw them. */
export function paintOrder(cells: readonly Cell[]): number[] {
  return cells
    .map((c, idx) => ({ idx, depth: c[0] + c[1] + c[2] }))
    .sort((a, b) => a.depth - b.depth || a.idx - b.idx)
    .map((e) => e.idx);
}

/** Unit size that fits the grid's projected bounds into the viewport. */
export function fitUnit(dims: Cell, opts: IsoOptions): number {
  const [nx, ny, nz] = dims;
  const spanX = nx + ny; // widest projected extent in units
  const spanY = (nx + ny) / 2 + nz;
  const usableW = opts.width - 2 * opts.margin;
  const usableH = opts.height - 2 * opts.margin;
  return Math.max(
    2,
    Math.min(usableW / Math.max(spanX, 1), usableH / Math.max(spanY, 1)),
  );
}

function shade(hex: string, f: number): string {
  const n = parseInt(hex.slice(1), 16);
  const ch = (v: number) => Math.round(Math.min(255, v * f));
  const r = ch((n >> 16) & 255);
  const g = ch((n >> 8) & 255);
  const b = ch(n & 255);
  return `#${((r << 16) | (g << 8) | b).toString(16).padStart(6, "0")}`;
}

type Ctx = CanvasRenderingContext2D;

function face(ctx: Ctx, pts: Array<[number, number]>, fill: string): void {
  ctx.beginPath();
  const first = pts[0];
  if (first === undefined) return;
  ctx.moveTo(first[0], first[1]);
  for (const [x, y] of pts.slice(1)) ctx.lineTo(x, y);
  ctx.closePath();
  ctx.fillStyle = fill;
  ctx.fill();
  ctx.strokeStyle = "rgba(30, 36, 46, 0.35)";
  ctx.lineWidth = 0.75;
  ctx.stroke();
}

export function draw(ctx: Ctx, scene: VoxelScene, opts: IsoOptions): void {
  ctx.clearRect(0, 0, opts.width, opts.height);
  const u = fitUnit(scene.dims, opts);
  const [nx, ny, nz] = scene.dims;
  // Center the projected bounding box in the viewport.
  const cx = opts.width / 2 - ((nx - ny) * u) / 2;
  const cy =
    opts.height / 2 + (nz * u) / 2 - ((nx + ny) / 4) * u + (u * ny) / 2;

  const order = paintOrder(scene.cells.map((c) => c.cell));
  for (const idx of order) {
    const sc = scene.cells[idx];
    if (sc === undefined) continue;
    const { x, y } = project(sc.cell, u);
    const px = cx + x;
    const py = cy + y;
    const base = FILL[sc.role];
    const ghost = sc.role === "pending" || sc.role === "pruned";
    ctx.globalAlpha = ghost ? 0.45 : 1.0;
    // top, left, right faces of a unit cube at (px, py)
    face(
      ctx,
      [
        [px, py],
        [px + u, py + u / 2],
        [px, py + u],
        [px - u, py + u / 2],
      ],
      shade(base, 1.0),
    );
    face(
      ctx,
      [
        [px - u, py + u / 2],
        [px, py + u],
        [px, py + 2 * u],
        [px - u, py + 1.5 * u],
      ],
      shade(base, 0.72),
    );
    face(
      ctx,
      [
        [px + u, py + u / 2],
        [px, py + u],
        [px, py + 2 * u],
        [px + u, py + 1.5 * u],
      ],
      shade(base, 0.55),
    );
    ctx.globalAlpha = 1.0;
  }
}
