"""
From a text prompt to a robot assembly plan
===========================================

Run with 'python3 demos/01_prompt_to_plan.py'. Uses the offline mock
generator, so no network or API key is needed.
"""

from promptfab.config import Config
from promptfab.pipeline import run_pipeline

# The mock provider matches the prompt against a small catalog of
# voxel sculptures; anything it does not recognize becomes a plain box.
config = Config(provider="mock")
result = run_pipeline("a simple stool", config)

# Stage 1 produced a triangle mesh, already scaled so that one voxel
# cell equals one 5 cm component.
print(f"mesh:     {len(result.mesh.triangles)} triangles")

# Stage 2 rasterized it into an occupancy grid.
grid = result.grid
print(f"grid:     {grid.dims[0]}x{grid.dims[1]}x{grid.dims[2]} cells, "
      f"{len(grid.occupied)} occupied")

# Stage 3 checked that the structure stands: one connected piece that
# touches the build plate, no cantilever longer than two cells.
print(f"check:    feasible={result.report.feasible}, "
      f"{len(result.report.pruned_cells)} cells pruned")

# Stage 4 ordered the cells bottom-up and solved a collision-free
# approach for each one with the 6-axis arm.
plan = result.plan
print(f"plan:     {len(plan.steps)} pick-and-place steps, "
      f"~{plan.estimated_duration:.0f} s of robot time")

# Every step carries the full toolpath: joint-space waypoints from the
# feeder to the place pose and back out.
first = plan.steps[0]
print(f"step 1:   cell {first.cell}, approach {first.approach_dir}, "
      f"{len(first.waypoints)} waypoints")
for w in first.waypoints:
    grip = f"  gripper {w.gripper}" if w.gripper else ""
    print(f"            {w.name:14s} -> {w.pose.position.round(3)}{grip}")

# Stage 5 rendered the grid and asked the verifier whether it still
# resembles the prompt.
print(f"verdict:  match={result.verdict.matches} "
      f"(score {result.verdict.score:.2f}): {result.verdict.rationale}")
