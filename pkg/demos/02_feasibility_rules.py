"""
What the feasibility checker accepts and rejects
================================================

Builds little voxel structures by hand and runs the structural rules
on them: grounded connectivity first, then the cantilever limit that
stands in for magnetic joint strength.
"""

import numpy as np

from promptfab.feasibility import SupportRule, analyze, cantilever_lengths
from promptfab.voxel import VoxelGrid


def grid_of(cells):
    cells = set(cells)
    dims = tuple(max(c[a] for c in cells) + 1 for a in range(3))
    return VoxelGrid(np.zeros(3), np.full(3, 0.05), dims, frozenset(cells))


def show(title, cells, rule=SupportRule()):
    pruned, report = analyze(grid_of(cells), rule)
    print(f"{title}")
    print(f"  components: {[len(c) for c in report.components]}, "
          f"pruned: {len(report.pruned_cells)}, feasible: {report.feasible}")
    for cell, d in report.overhang_violations:
        print(f"  violation: {cell} hangs {d} cells from support")
    print()


# A tower with a floating block next to it. The block cannot be built,
# so it is pruned and the rest passes.
tower = [(0, 0, k) for k in range(4)]
show("tower + floating block", tower + [(3, 3, 2)])

# A letter T: the bar sticks out two cells each side of the column,
# exactly at the default cantilever limit.
column = [(2, 0, k) for k in range(4)]
bar = [(i, 0, 4) for i in range(5)]
show("letter T, bar half-width 2", column + bar)

# Stretch the bar one cell further and the ends exceed the limit.
wide_bar = [(i, 0, 4) for i in range(6)]
show("letter T, bar overhangs 3", [(2, 0, k) for k in range(4)] + wide_bar)

# The same shape under a stricter rule fails earlier.
show("same T under max_cantilever=1", column + bar, SupportRule(max_cantilever=1))

# Cantilever distance is measured within a layer, through occupied
# cells, to the nearest vertically supported cell.
bridge = [(0, 0, 0), (4, 0, 0), (0, 0, 1), (1, 0, 1), (2, 0, 1), (3, 0, 1), (4, 0, 1)]
lengths = cantilever_lengths(grid_of(bridge))
middle = (2, 0, 1)
print(f"bridge deck: cell {middle} is {lengths[middle]:.0f} steps from a pier,")
print("so a 5-wide span just meets the default limit of 2.")
