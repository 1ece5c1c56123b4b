"""Offline object catalog: seven parametric fixtures built from unit cells.

Each object is defined as a set of integer cells (1 unit = 1 cell) and
meshed by emitting only the boundary faces, which makes the result
watertight by construction and keeps voxelization exact when the mesh is
scaled back onto a cell grid at its natural height. The generation seed
spins the object in 90-degree increments so distinct seeds yield
distinct but equally buildable meshes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import TriangleMesh, _is_watertight

Cell = tuple[int, int, int]

# face templates: direction -> four quad corners, wound outward
_FACES: dict[Cell, tuple[tuple[int, int, int], ...]] = {
    (1, 0, 0): ((1, 0, 0), (1, 1, 0), (1, 1, 1), (1, 0, 1)),
    (-1, 0, 0): ((0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 0)),
    (0, 1, 0): ((0, 1, 0), (0, 1, 1), (1, 1, 1), (1, 1, 0)),
    (0, -1, 0): ((0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)),
    (0, 0, 1): ((0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)),
    (0, 0, -1): ((0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 0)),
}


def cells_to_mesh(cells, name: str = "") -> TriangleMesh:
    """Boundary-face mesh of a cell set, one unit per cell, welded."""
    cell_set = set(tuple(int(x) for x in c) for c in cells)
    if not cell_set:
        raise ValueError("cells must be nonempty")
    vertex_index: dict[Cell, int] = {}
    vertices: list[Cell] = []
    triangles: list[tuple[int, int, int]] = []

    def vid(corner: Cell) -> int:
        if corner not in vertex_index:
            vertex_index[corner] = len(vertices)
            vertices.append(corner)
        return vertex_index[corner]

    for cell in sorted(cell_set):
        for direction, quad in _FACES.items():
            neighbor = (cell[0] + direction[0], cell[1] + direction[1], cell[2] + direction[2])
            if neighbor in cell_set:
                continue
            ids = [vid((cell[0] + dx, cell[1] + dy, cell[2] + dz)) for dx, dy, dz in quad]
            triangles.append((ids[0], ids[1], ids[2]))
            triangles.append((ids[0], ids[2], ids[3]))

    verts = np.asarray(vertices, dtype=float)
    tris = np.asarray(triangles, dtype=np.int64)
    return TriangleMesh(
        vertices=verts,
        triangles=tris,
        name=name,
        watertight=_is_watertight(tris),
        degenerate_dropped=0,
    )


@dataclass(frozen=True)
class CatalogObject:
    name: str
    keywords: tuple[str, ...]
    cells: frozenset[Cell]
    description: str

    @property
    def cell_count(self) -> int:
        return len(self.cells)

    @property
    def height_cells(self) -> int:
        return max(c[2] for c in self.cells) + 1


def _cells(*groups) -> frozenset[Cell]:
    out: set[Cell] = set()
    for g in groups:
        out.update(g)
    return frozenset(out)


def _column(i, j, k0, k1):
    return [(i, j, k) for k in range(k0, k1)]


def _slab(i0, i1, j0, j1, k):
    return [(i, j, k) for i in range(i0, i1) for j in range(j0, j1)]


_STOOL = _cells(
    _column(0, 0, 0, 2), _column(0, 2, 0, 2), _column(2, 0, 0, 2), _column(2, 2, 0, 2),
    _slab(0, 3, 0, 3, 2),
)

_SHELF = _cells(
    *[_column(i, j, 0, 5) for i in (0, 1) for j in (0, 3)],
    _slab(0, 2, 1, 3, 2), _slab(0, 2, 1, 3, 4),
)

_COFFEE_TABLE = _cells(
    [(0, 0, 0), (3, 0, 0), (0, 2, 0), (3, 2, 0)],
    _slab(0, 4, 0, 3, 1),
)

_CHAIR = _cells(
    [(0, 0, 0), (0, 2, 0), (2, 0, 0), (2, 2, 0)],
    _slab(0, 3, 0, 3, 1),
    [(0, j, k) for j in range(3) for k in (2, 3)],
)

_DOG = _cells(
    [(i, j, k) for i in (0, 1) for j in (1, 4) for k in (0, 1)],  # legs
    _slab(0, 2, 1, 5, 2),                                         # body
    [(i, 1, 3) for i in (0, 1)],                                  # neck
    [(i, 1, 4) for i in (0, 1)],                                  # head
    [(i, 0, 4) for i in (0, 1)],                                  # snout
)

_LETTER_T = _cells(
    _column(2, 0, 0, 4),
    [(i, 0, 4) for i in range(5)],
)

_ONE_LEG_TABLE = _cells(
    _column(1, 1, 0, 2),
    _slab(0, 3, 0, 3, 2),
)

CATALOG: dict[str, CatalogObject] = {
    obj.name: obj
    for obj in (
        CatalogObject("stool", ("stool",), _STOOL, "four-legged stool with a square seat"),
        CatalogObject("shelf", ("shelf", "bookshelf", "shelving"), _SHELF, "two-tier shelf"),
        CatalogObject(
            "coffee_table", ("coffee table", "table"), _COFFEE_TABLE, "low four-legged table"
        ),
        CatalogObject("chair", ("chair",), _CHAIR, "short chair with a backrest"),
        CatalogObject("dog", ("dog", "puppy"), _DOG, "tall dog with a raised head"),
        CatalogObject("letter_t", ("letter t",), _LETTER_T, "capital letter T"),
        CatalogObject(
            "one_leg_table",
            ("table with one leg", "one leg", "one-legged table", "single leg"),
            _ONE_LEG_TABLE,
            "table balanced on a single center leg",
        ),
    )
}


def match_prompt(prompt: str) -> CatalogObject | None:
    """Keyword lookup, most specific phrasing first; None when nothing fits."""
    text = " ".join(prompt.lower().split())
    ordered = [
        "one_leg_table",  # "table with one leg" must win over plain "table"
        "coffee_table",
        "stool",
        "shelf",
        "chair",
        "dog",
        "letter_t",
    ]
    for name in ordered:
        obj = CATALOG[name]
        if any(kw in text for kw in obj.keywords):
            return obj
    return None


def _rotate_cells(cells: frozenset[Cell], quarter_turns: int) -> frozenset[Cell]:
    turns = quarter_turns % 4
    out = set(cells)
    for _ in range(turns):
        max_i = max(c[0] for c in out)
        out = {(j, max_i - i, k) for i, j, k in out}
    return frozenset(out)


def build_mesh(obj: CatalogObject, seed: int = 0) -> TriangleMesh:
    """Mesh an object, spun by the seed; identical inputs give identical bytes."""
    return cells_to_mesh(_rotate_cells(obj.cells, seed), name=obj.name)


def list_catalog() -> list[dict]:
    return [
        {
            "name": obj.name,
            "keywords": list(obj.keywords),
            "cells": obj.cell_count,
            "height_cells": obj.height_cells,
            "description": obj.description,
        }
        for obj in CATALOG.values()
    ]
