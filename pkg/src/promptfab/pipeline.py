"""One-shot orchestration: prompt in, assembly artifacts out.

The stages mirror the job lifecycle of the service: generate a mesh,
scale and voxelize it, check structural feasibility, plan the assembly,
then render the grid and ask the verifier whether it resembles the
prompt.  Each stage is callable on its own so the service can persist
intermediate artifacts and report progress between them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import Config
from .errors import NotGrounded
from .feasibility import FeasibilityReport, analyze
from .kinematics import ArmModel
from .mesh import TriangleMesh
from .planner import AssemblyPlan, plan_assembly
from .providers import GenerationRequest, ResemblanceVerdict, generate_mesh, verify_resemblance
from .render import render_grid
from .voxel import VoxelGrid, voxelize

STAGES = ("generated", "voxelized", "checked", "planned", "verified")


@dataclass
class PipelineResult:
    prompt: str
    seed: int
    mesh: TriangleMesh
    grid: VoxelGrid
    pruned: VoxelGrid
    report: FeasibilityReport
    plan: AssemblyPlan | None = None
    render_png: bytes = b""
    verdict: ResemblanceVerdict | None = None
    timings: dict = field(default_factory=dict)


def stage_generate(prompt: str, config: Config, seed: int | None = None) -> TriangleMesh:
    request = GenerationRequest(
        prompt=prompt,
        seed=config.generation_seed if seed is None else seed,
        target=config.scaling_target(),
    )
    return generate_mesh(request, provider=config.provider, config=config.remote())


def stage_voxelize(mesh: TriangleMesh, config: Config) -> tuple[TriangleMesh, VoxelGrid]:
    """Scale the mesh to its cell budget and voxelize it.

    Returns the scaled mesh (in metres, aligned with grid coordinates)
    alongside the raw occupancy grid.
    """
    spec = config.component_spec()
    scaled = config.scaling_target().resolve(mesh, spec)
    return scaled, voxelize(scaled, spec)


def stage_check(grid: VoxelGrid, config: Config) -> tuple[VoxelGrid, FeasibilityReport]:
    return analyze(grid, config.support_rule())


def stage_plan(pruned: VoxelGrid, config: Config, arm: ArmModel | None = None) -> AssemblyPlan:
    return plan_assembly(pruned, arm=config.arm() if arm is None else arm,
                         rule=config.support_rule())


def stage_verify(
    png: bytes, prompt: str, config: Config
) -> ResemblanceVerdict:
    return verify_resemblance(png, prompt, provider=config.provider, config=config.remote())


def run_pipeline(
    prompt: str,
    config: Config | None = None,
    seed: int | None = None,
    arm: ArmModel | None = None,
) -> PipelineResult:
    """Run every stage and return the full artifact bundle.

    Raises NotGrounded if the feasibility check leaves nothing buildable,
    and propagates Unplannable from the planner.
    """
    import time

    config = config or Config()
    timings: dict = {}

    t0 = time.perf_counter()
    mesh = stage_generate(prompt, config, seed)
    timings["generated"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    scaled, grid = stage_voxelize(mesh, config)
    timings["voxelized"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    pruned, report = stage_check(grid, config)
    timings["checked"] = time.perf_counter() - t0

    result = PipelineResult(
        prompt=prompt,
        seed=config.generation_seed if seed is None else seed,
        mesh=scaled,
        grid=grid,
        pruned=pruned,
        report=report,
        timings=timings,
    )
    if not report.feasible:
        raise NotGrounded(
            "feasibility check failed: "
            f"{len(report.overhang_violations)} overhang violations, "
            f"{len(report.pruned_cells)} cells pruned, "
            f"grounded component {'present' if report.grounded_component else 'missing'}"
        )

    t0 = time.perf_counter()
    result.plan = stage_plan(pruned, config, arm)
    timings["planned"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    result.render_png = render_grid(pruned)
    result.verdict = stage_verify(result.render_png, prompt, config)
    timings["verified"] = time.perf_counter() - t0
    return result
