"""Structural feasibility checks over a voxel grid.

Covers connectivity (one face-connected structure reaching the build
plate) and overhang support (a cantilever-length limit standing in for
magnetic joint strength). Arm reachability is the planner's job.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .errors import NotGrounded
from .voxel import Cell, VoxelGrid

FACE_NEIGHBORS = (
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
)
LAYER_NEIGHBORS = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0))


@dataclass(frozen=True)
class SupportRule:
    """Cantilever limit in cells; connectivity is fixed face adjacency."""

    max_cantilever: float = 2

    def __post_init__(self):
        if self.max_cantilever < 0:
            raise ValueError("max_cantilever must be >= 0")


@dataclass(frozen=True)
class FeasibilityReport:
    components: tuple[frozenset[Cell], ...]
    grounded_component: int | None
    pruned_cells: frozenset[Cell] = field(default_factory=frozenset)
    overhang_violations: tuple[tuple[Cell, float], ...] = ()
    feasible: bool = False

    def to_dict(self) -> dict:
        return {
            "component_sizes": [len(c) for c in self.components],
            "grounded_component": self.grounded_component,
            "pruned_cells": [list(c) for c in sorted(self.pruned_cells)],
            "overhang_violations": [
                {"cell": list(cell), "cantilever": None if math.isinf(d) else int(d)}
                for cell, d in self.overhang_violations
            ],
            "feasible": self.feasible,
        }


def connected_components(grid: VoxelGrid) -> list[frozenset[Cell]]:
    """Maximal 6-connected components, largest first, ties by smallest cell."""
    remaining = set(grid.occupied)
    components = []
    while remaining:
        seed = min(remaining)
        comp = {seed}
        frontier = deque([seed])
        remaining.discard(seed)
        while frontier:
            i, j, k = frontier.popleft()
            for di, dj, dk in FACE_NEIGHBORS:
                nb = (i + di, j + dj, k + dk)
                if nb in remaining:
                    remaining.discard(nb)
                    comp.add(nb)
                    frontier.append(nb)
        components.append(frozenset(comp))
    components.sort(key=lambda c: (-len(c), min(c)))
    return components


def prune_to_grounded(grid: VoxelGrid) -> tuple[VoxelGrid, FeasibilityReport]:
    """Keep the largest connected component touching layer k=0.

    Everything else is pruned and reported. When no component touches
    the plate the grid comes back unchanged with ``feasible=False``;
    failure lives in the report, not an exception, so the operator can
    decide whether to regenerate.
    """
    components = connected_components(grid)
    grounded_idx = None
    for idx, comp in enumerate(components):
        if any(c[2] == 0 for c in comp):
            grounded_idx = idx  # components are sorted largest-first
            break
    if grounded_idx is None:
        return grid, FeasibilityReport(
            components=tuple(components),
            grounded_component=None,
            feasible=False,
        )
    keep = components[grounded_idx]
    pruned = frozenset(grid.occupied - keep)
    return grid.replace_occupied(keep), FeasibilityReport(
        components=tuple(components),
        grounded_component=grounded_idx,
        pruned_cells=pruned,
        feasible=True,
    )


def cantilever_lengths(grid: VoxelGrid) -> dict[Cell, float]:
    """In-layer graph distance from each cell to vertical support.

    A cell is its own support (distance 0) when it sits at k=0 or has an
    occupied cell directly below. Others take the shortest 4-neighbor
    path within their layer's occupied cells; ``inf`` if no such path.
    """
    occupied = grid.occupied
    layers: dict[int, set[Cell]] = {}
    for cell in occupied:
        layers.setdefault(cell[2], set()).add(cell)

    dist: dict[Cell, float] = {}
    for k, cells in layers.items():
        supported = [
            c for c in cells if k == 0 or (c[0], c[1], c[2] - 1) in occupied
        ]
        for c in cells:
            dist[c] = math.inf
        frontier = deque()
        for c in supported:
            dist[c] = 0
            frontier.append(c)
        while frontier:
            cell = frontier.popleft()
            d = dist[cell] + 1
            for di, dj, _ in LAYER_NEIGHBORS:
                nb = (cell[0] + di, cell[1] + dj, k)
                if nb in cells and d < dist[nb]:
                    dist[nb] = d
                    frontier.append(nb)
    return dist


def overhang_check(grid: VoxelGrid, rule: SupportRule) -> list[tuple[Cell, float]]:
    """Cells whose cantilever length exceeds the rule's limit.

    Requires a single grounded component (run :func:`prune_to_grounded`
    first). Violations are ordered by layer, then lexicographically.
    """
    components = connected_components(grid)
    if len(components) != 1 or not any(c[2] == 0 for c in components[0]):
        raise NotGrounded(
            f"overhang check needs one grounded component, found "
            f"{len(components)} component(s)"
        )
    dist = cantilever_lengths(grid)
    violations = [
        (cell, d) for cell, d in dist.items() if d > rule.max_cantilever
    ]
    violations.sort(key=lambda item: (item[0][2], item[0]))
    return violations


def analyze(grid: VoxelGrid, rule: SupportRule) -> tuple[VoxelGrid, FeasibilityReport]:
    """Full feasibility pass: prune to the grounded component, then check overhangs."""
    pruned_grid, report = prune_to_grounded(grid)
    if not report.feasible:
        return pruned_grid, report
    violations = tuple(overhang_check(pruned_grid, rule))
    return pruned_grid, FeasibilityReport(
        components=report.components,
        grounded_component=report.grounded_component,
        pruned_cells=report.pruned_cells,
        overhang_violations=violations,
        feasible=not violations,
    )
