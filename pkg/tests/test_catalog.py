"""Built-in object catalog: mesh construction and the fixture contract."""

import pytest

import oracles
from promptfab.catalog import (
    CATALOG,
    build_mesh,
    cells_to_mesh,
    list_catalog,
    match_prompt,
)
from promptfab.feasibility import SupportRule, analyze
from promptfab.mesh import serialize_mesh
from promptfab.voxel import ComponentSpec, ScalingTarget, voxelize

EXPECTED = {
    "stool": (17, 3),
    "shelf": (28, 5),
    "coffee_table": (16, 2),
    "chair": (19, 4),
    "dog": (22, 5),
    "letter_t": (9, 5),
    "one_leg_table": (11, 3),
}


def test_catalog_has_seven_objects():
    assert set(CATALOG) == set(EXPECTED)
    for name, (cells, height) in EXPECTED.items():
        obj = CATALOG[name]
        assert obj.cell_count == cells, name
        assert obj.height_cells == height, name


def test_all_meshes_watertight():
    for obj in CATALOG.values():
        mesh = build_mesh(obj)
        assert mesh.watertight, obj.name
        assert mesh.num_triangles > 0


def test_meshes_voxelize_back_to_their_cells():
    """Scaling to the natural height reproduces the defining cell set."""
    spec = ComponentSpec()
    for obj in CATALOG.values():
        mesh = build_mesh(obj)
        scaled = ScalingTarget().resolve(mesh, spec)
        grid = voxelize(scaled, spec)
        assert grid.occupied == obj.cells, obj.name


def test_catalog_grids_feasible_within_pool():
    spec = ComponentSpec()
    for obj in CATALOG.values():
        mesh = build_mesh(obj)
        grid = voxelize(ScalingTarget().resolve(mesh, spec), spec)
        assert len(grid.occupied) <= 40, obj.name
        pruned, report = analyze(grid, SupportRule())
        assert report.feasible, obj.name
        assert not report.pruned_cells, obj.name


def test_build_mesh_deterministic():
    a = serialize_mesh(build_mesh(CATALOG["stool"], seed=3), "stl_binary")
    b = serialize_mesh(build_mesh(CATALOG["stool"], seed=3), "stl_binary")
    assert a == b


def test_seed_spins_without_changing_size():
    base = CATALOG["chair"]
    spun = build_mesh(base, seed=1)
    flat = build_mesh(base, seed=0)
    assert serialize_mesh(spun, "stl_binary") != serialize_mesh(flat, "stl_binary")
    spec = ComponentSpec()
    for seed in range(4):
        mesh = build_mesh(base, seed=seed)
        grid = voxelize(ScalingTarget().resolve(mesh, spec), spec)
        assert len(grid.occupied) == base.cell_count
        _, report = analyze(grid, SupportRule())
        assert report.feasible


def test_cells_to_mesh_counts():
    single = cells_to_mesh({(0, 0, 0)})
    assert single.num_triangles == 12
    assert len(single.vertices) == 8
    assert single.watertight

    double = cells_to_mesh({(0, 0, 0), (1, 0, 0)})
    assert double.num_triangles == 20  # shared face removed from both sides
    assert len(double.vertices) == 12
    assert double.watertight


def test_cells_to_mesh_rejects_empty():
    with pytest.raises(ValueError):
        cells_to_mesh(set())


def test_match_prompt_specificity():
    assert match_prompt("a simple stool").name == "stool"
    assert match_prompt("assemble me a table with one leg").name == "one_leg_table"
    assert match_prompt("a small coffee table").name == "coffee_table"
    assert match_prompt("a table").name == "coffee_table"
    assert match_prompt("a bookshelf for my room").name == "shelf"
    assert match_prompt("a happy puppy").name == "dog"
    assert match_prompt("the letter t").name == "letter_t"
    assert match_prompt("a spaceship") is None


def test_match_prompt_normalizes_whitespace_and_case():
    assert match_prompt("  A  Simple\n STOOL ").name == "stool"


def test_list_catalog_shape():
    entries = list_catalog()
    assert len(entries) == 7
    for entry in entries:
        assert set(entry) == {"name", "keywords", "cells", "height_cells", "description"}
        assert entry["cells"] == EXPECTED[entry["name"]][0]
        assert entry["height_cells"] == EXPECTED[entry["name"]][1]
