"""Discretize meshes into the cuboidal component lattice.

Each lattice cell corresponds to one physical assembly component. A cell
is occupied when the estimated inside-volume fraction of the mesh meets
the occupancy threshold; the fraction is estimated with stratified,
seeded jittered sampling so grids are bit-reproducible (and per-cell
streams are independent, so parallel evaluation cannot change results).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateBounds, EmptyResult
from .mesh import TriangleMesh, mesh_bounds, points_in_mesh

Cell = tuple[int, int, int]

# Extent equal to an exact multiple of the cell size must not spill into an
# extra cell row.  Binary STL stores float32, so a nominal 0.05 comes back as
# 0.05000000074...; the slack has to cover that, not just float64 dust.
_DIM_EPS = 1e-6


@dataclass(frozen=True)
class ComponentSpec:
    """Physical component dimensions and occupancy sampling policy."""

    cell_size: np.ndarray = (0.05, 0.05, 0.05)
    occupancy_threshold: float = 0.5
    samples_per_axis: int = 4
    seed: int = 0

    def __post_init__(self):
        size = np.asarray(self.cell_size, dtype=float)
        if size.shape == ():
            size = np.full(3, float(size))
        if size.shape != (3,) or np.any(size <= 0):
            raise ValueError(f"cell_size must be 3 positive extents, got {self.cell_size!r}")
        size.setflags(write=False)
        object.__setattr__(self, "cell_size", size)
        if not 0.0 < self.occupancy_threshold <= 1.0:
            raise ValueError("occupancy_threshold must be in (0, 1]")
        if self.samples_per_axis < 2:
            raise ValueError("samples_per_axis must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.cell_size))


@dataclass(frozen=True)
class VoxelGrid:
    """Axis-aligned occupancy lattice at component resolution.

    ``origin`` is the world position of cell (0, 0, 0)'s min corner and
    also the build-plate plane (layer k=0 rests on z = origin.z).
    """

    origin: np.ndarray
    cell_size: np.ndarray
    dims: tuple[int, int, int]
    occupied: frozenset[Cell] = field(default_factory=frozenset)

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float)
        size = np.asarray(self.cell_size, dtype=float)
        origin.setflags(write=False)
        size.setflags(write=False)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "cell_size", size)
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) != 3 or any(d < 1 for d in dims):
            raise ValueError(f"dims must be three integers >= 1, got {self.dims!r}")
        occ = frozenset((int(i), int(j), int(k)) for i, j, k in self.occupied)
        object.__setattr__(self, "occupied", occ)
        for c in occ:
            if any(x < 0 or x >= d for x, d in zip(c, dims)):
                raise ValueError(f"occupied cell {c} outside dims {dims}")

    def __len__(self) -> int:
        return len(self.occupied)

    def cells_sorted(self) -> list[Cell]:
        return sorted(self.occupied)

    def cell_min_corner(self, cell: Cell) -> np.ndarray:
        return self.origin + np.asarray(cell, dtype=float) * self.cell_size

    def cell_center(self, cell: Cell) -> np.ndarray:
        return self.origin + (np.asarray(cell, dtype=float) + 0.5) * self.cell_size

    def layer(self, k: int) -> frozenset[Cell]:
        return frozenset(c for c in self.occupied if c[2] == k)

    def replace_occupied(self, occupied) -> "VoxelGrid":
        return VoxelGrid(self.origin, self.cell_size, self.dims, frozenset(occupied))


def voxelize(mesh: TriangleMesh, spec: ComponentSpec) -> VoxelGrid:
    """Sample-classify every candidate cell under the mesh bounds.

    The grid origin is the mesh's min corner, so that corner falls in
    cell (0, 0, 0). Raises :class:`EmptyResult` when no cell reaches the
    occupancy threshold (the shape is thinner than one component
    everywhere).
    """
    bounds = mesh_bounds(mesh)
    if bounds.min[2] < -1e-9:
        raise ValueError(f"mesh must rest at z >= 0, min z is {bounds.min[2]}")
    dims = _grid_dims(bounds.extents, spec.cell_size)
    fractions = _occupancy_fractions(mesh, bounds.min, dims, spec)
    occupied = {
        cell for cell, frac in fractions.items() if frac >= spec.occupancy_threshold
    }
    if not occupied:
        raise EmptyResult(
            f"no cell reached occupancy {spec.occupancy_threshold} "
            f"(max fraction {max(fractions.values()):.3f})"
        )
    return VoxelGrid(bounds.min, spec.cell_size, dims, frozenset(occupied))


def _grid_dims(extents: np.ndarray, cell_size: np.ndarray) -> tuple[int, int, int]:
    raw = np.ceil(extents / cell_size - _DIM_EPS).astype(int)
    return tuple(int(max(1, d)) for d in raw)


def _occupancy_fractions(
    mesh: TriangleMesh, origin: np.ndarray, dims: tuple[int, int, int], spec: ComponentSpec
) -> dict[Cell, float]:
    n = spec.samples_per_axis
    cells = [
        (i, j, k)
        for i in range(dims[0])
        for j in range(dims[1])
        for k in range(dims[2])
    ]
    points = np.empty((len(cells), n**3, 3), dtype=float)
    for row, cell in enumerate(cells):
        points[row] = origin + (
            (np.asarray(cell, dtype=float) + _unit_samples(spec.seed, cell, n))
            * spec.cell_size
        )
    inside = points_in_mesh(mesh, points.reshape(-1, 3)).reshape(len(cells), n**3)
    frac = inside.mean(axis=1)
    return {cell: float(f) for cell, f in zip(cells, frac)}


def _unit_samples(seed: int, cell: Cell, n: int) -> np.ndarray:
    """Stratified jittered sample offsets in [0, 1)^3, one stratum per subcell.

    The stream is keyed on (seed, cell index) so evaluation order is
    irrelevant: a parallel voxelizer gets bit-identical grids.
    """
    rng = np.random.default_rng(np.random.SeedSequence((seed, *cell)))
    ii, jj, kk = np.meshgrid(range(n), range(n), range(n), indexing="ij")
    strata = np.stack([ii, jj, kk], axis=-1).reshape(-1, 3)
    return (strata + rng.random((n**3, 3))) / n


def scale_mesh_to_cells(
    mesh: TriangleMesh,
    spec: ComponentSpec,
    height_cells: int | None = None,
    max_cells: int | None = None,
) -> TriangleMesh:
    """Uniformly scale and translate a mesh onto the build plate.

    Exactly one target must be given. ``height_cells`` scales the mesh
    so its z extent spans that many cells; ``max_cells`` walks integer
    cell heights upward and keeps the tallest scaling whose voxelization
    stays within the component budget, stopping at the first height that
    exceeds it. The result rests on z = 0 with its footprint centered on
    the plate origin (where the arm workspace is widest).
    """
    if (height_cells is None) == (max_cells is None):
        raise ValueError("pass exactly one of height_cells / max_cells")
    bounds = mesh_bounds(mesh)
    if bounds.extents[2] <= 0:
        raise DegenerateBounds(f"mesh has zero z extent: {bounds.extents}")

    if height_cells is not None:
        if height_cells < 1:
            raise ValueError("height_cells must be >= 1")
        scale = height_cells * spec.cell_size[2] / bounds.extents[2]
        anchor = np.array(
            [(bounds.min[0] + bounds.max[0]) / 2, (bounds.min[1] + bounds.max[1]) / 2, bounds.min[2]]
        )
        return mesh.transformed(scale, -anchor * scale)

    if max_cells < 1:
        raise ValueError("max_cells must be >= 1")
    best = None
    for h in range(1, 101):
        candidate = scale_mesh_to_cells(mesh, spec, height_cells=h)
        try:
            count = len(voxelize(candidate, spec))
        except EmptyResult:
            continue
        if count > max_cells:
            break
        best = candidate
    if best is None:
        raise ValueError(f"no scaling keeps the mesh within {max_cells} cells")
    return best


@dataclass(frozen=True)
class ScalingTarget:
    """How a generated mesh should be sized onto the plate.

    With neither field set the mesh keeps its native height when it was
    modeled in whole cell units, falling back to the component budget
    otherwise (see :func:`resolve` for the rule).
    """

    height_cells: int | None = None
    max_cells: int | None = None

    def __post_init__(self):
        if self.height_cells is not None and self.max_cells is not None:
            raise ValueError("set at most one of height_cells / max_cells")

    def resolve(self, mesh: TriangleMesh, spec: ComponentSpec, budget: int = 40) -> TriangleMesh:
        if self.height_cells is not None:
            return scale_mesh_to_cells(mesh, spec, height_cells=self.height_cells)
        if self.max_cells is not None:
            return scale_mesh_to_cells(mesh, spec, max_cells=self.max_cells)
        z_extent = float(mesh_bounds(mesh).extents[2])
        if abs(z_extent - round(z_extent)) < 1e-9 and 1 <= round(z_extent) <= 100:
            return scale_mesh_to_cells(mesh, spec, height_cells=int(round(z_extent)))
        return scale_mesh_to_cells(mesh, spec, max_cells=budget)


def occupied_volume(grid: VoxelGrid) -> float:
    """Total component volume in cubic meters."""
    return len(grid.occupied) * float(np.prod(grid.cell_size))


# ---------------------------------------------------------------------------
# Canonical serialization (golden-test friendly)
# ---------------------------------------------------------------------------


def grid_to_dict(grid: VoxelGrid) -> dict:
    return {
        "origin": [float(x) for x in grid.origin],
        "cell_size": [float(x) for x in grid.cell_size],
        "dims": list(grid.dims),
        "occupied": [list(c) for c in grid.cells_sorted()],
    }


def grid_to_json(grid: VoxelGrid) -> str:
    """Canonical form: keys sorted, occupied cells in lexicographic order."""
    return json.dumps(grid_to_dict(grid), sort_keys=True, separators=(",", ":"))


def grid_from_dict(payload: dict) -> VoxelGrid:
    return VoxelGrid(
        origin=np.asarray(payload["origin"], dtype=float),
        cell_size=np.asarray(payload["cell_size"], dtype=float),
        dims=tuple(payload["dims"]),
        occupied=frozenset(tuple(c) for c in payload["occupied"]),
    )


def grid_from_json(text: str) -> VoxelGrid:
    return grid_from_dict(json.loads(text))
