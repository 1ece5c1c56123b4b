"""Assembly planning: order, toolpath, duration estimate, disassembly.

The planner walks the grid bottom-up layer by layer, picking each
component from a fixed feeder and carrying it over the structure at a
safe ceiling before descending into an approach corridor. All waypoints
are spaced at most 0.05 m apart in tool space and each one carries an
IK-verified joint configuration, so a discrete collision check per
waypoint stands in for swept-volume checking.

``validate_plan`` is a deliberately separate replay checker: it rebuilds
the placed set step by step and re-derives support, connectivity,
clearance, reachability, and collision from the grid geometry alone,
without consulting any planner decision logic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import JointLimit, NoConvergence, Unplannable
from .feasibility import FACE_NEIGHBORS, SupportRule, analyze
from .kinematics import (
    ArmModel,
    JointConfig,
    Pose,
    any_collision,
    arm_collides,
    fk,
    ik,
    load_profile_dict,
    matrix_to_quat,
    quat_slerp,
    reachable,
)
from .voxel import Cell, VoxelGrid, grid_from_dict, grid_to_dict

WAYPOINT_SPACING = 0.05

APPROACH_DIRS: tuple[tuple[str, tuple[int, int, int]], ...] = (
    ("+z", (0, 0, 1)),
    ("+x", (1, 0, 0)),
    ("-x", (-1, 0, 0)),
    ("+y", (0, 1, 0)),
    ("-y", (0, -1, 0)),
)
_APPROACH_VECTORS = dict(APPROACH_DIRS)


@dataclass(frozen=True)
class MotionProfile:
    """Joint velocity/acceleration caps and gripper dwells for timing."""

    joint_vel_max: np.ndarray
    joint_acc_max: np.ndarray
    pick_dwell: float = 0.3
    place_dwell: float = 0.3

    def __post_init__(self):
        vel = np.asarray(self.joint_vel_max, dtype=float)
        acc = np.asarray(self.joint_acc_max, dtype=float)
        if vel.shape != (6,) or acc.shape != (6,):
            raise ValueError("expected 6 velocity and 6 acceleration limits")
        if np.any(vel <= 0) or np.any(acc <= 0) or self.pick_dwell < 0 or self.place_dwell < 0:
            raise ValueError("motion limits must be positive, dwells non-negative")
        vel.setflags(write=False)
        acc.setflags(write=False)
        object.__setattr__(self, "joint_vel_max", vel)
        object.__setattr__(self, "joint_acc_max", acc)

    @classmethod
    def from_dict(cls, d) -> "MotionProfile":
        return cls(
            joint_vel_max=np.asarray(d["joint_vel_max"], float),
            joint_acc_max=np.asarray(d["joint_acc_max"], float),
            pick_dwell=float(d.get("pick_dwell", 0.3)),
            place_dwell=float(d.get("place_dwell", 0.3)),
        )

    def to_dict(self) -> dict:
        return {
            "joint_vel_max": [float(v) for v in self.joint_vel_max],
            "joint_acc_max": [float(a) for a in self.joint_acc_max],
            "pick_dwell": self.pick_dwell,
            "place_dwell": self.place_dwell,
        }

    def leg_times(self, dq: np.ndarray) -> np.ndarray:
        """Trapezoidal time per leg: max over joints, (L, 6) -> (L,)."""
        dq = np.abs(np.atleast_2d(dq))
        vel, acc = self.joint_vel_max, self.joint_acc_max
        triangular = 2.0 * np.sqrt(dq / acc)
        trapezoid = dq / vel + vel / acc
        t = np.where(dq * acc <= vel**2, triangular, trapezoid)
        return t.max(axis=1)


@dataclass(frozen=True)
class Workspace:
    """Fixed feeder pose and clearance parameters around the build plate."""

    feeder: np.ndarray
    safe_clearance: float = 0.1
    corridor_cells: int = 1

    def __post_init__(self):
        feeder = np.asarray(self.feeder, dtype=float)
        if feeder.shape != (3,):
            raise ValueError("feeder must be a 3-vector")
        if self.safe_clearance <= 0 or self.corridor_cells < 1:
            raise ValueError("clearance must be positive, corridor at least one cell")
        feeder.setflags(write=False)
        object.__setattr__(self, "feeder", feeder)

    @classmethod
    def from_dict(cls, d) -> "Workspace":
        return cls(
            feeder=np.asarray(d["feeder"], float),
            safe_clearance=float(d.get("safe_clearance", 0.1)),
            corridor_cells=int(d.get("corridor_cells", 1)),
        )


@dataclass(frozen=True)
class Waypoint:
    """One toolpath sample: named tool pose, joint witness, gripper event."""

    name: str
    pose: Pose
    q: JointConfig
    gripper: str | None = None  # "open" | "close" at this waypoint


@dataclass(frozen=True)
class AssemblyStep:
    cell: Cell
    component_id: str
    pick: Pose
    place: Pose
    approach_dir: str
    witness_q: JointConfig
    waypoints: tuple[Waypoint, ...]


@dataclass(frozen=True)
class AssemblyPlan:
    steps: tuple[AssemblyStep, ...]
    grid: VoxelGrid
    estimated_duration: float


_DEFAULTS: dict = {}


def default_motion() -> MotionProfile:
    if "motion" not in _DEFAULTS:
        _DEFAULTS["motion"] = MotionProfile.from_dict(load_profile_dict()["motion"])
    return _DEFAULTS["motion"]


def default_workspace() -> Workspace:
    if "workspace" not in _DEFAULTS:
        _DEFAULTS["workspace"] = Workspace.from_dict(load_profile_dict()["workspace"])
    return _DEFAULTS["workspace"]


# ---------------------------------------------------------------------------
# Geometry helpers
# ---------------------------------------------------------------------------


def tool_orientation(tool_z) -> np.ndarray:
    """Quaternion whose frame points the tool axis along ``tool_z``.

    The free rotation about the tool axis is fixed deterministically from
    a world reference axis.
    """
    tz = np.asarray(tool_z, dtype=float)
    tz = tz / np.linalg.norm(tz)
    ref = np.array([1.0, 0.0, 0.0]) if abs(tz[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    tx = np.cross(ref, tz)
    tx = tx / np.linalg.norm(tx)
    ty = np.cross(tz, tx)
    return matrix_to_quat(np.stack([tx, ty, tz], axis=1))


_DOWN = tool_orientation((0.0, 0.0, -1.0))


def _ladder(p0: np.ndarray, p1: np.ndarray) -> list[np.ndarray]:
    """Points after p0 up to and including p1, spaced <= WAYPOINT_SPACING."""
    dist = float(np.linalg.norm(p1 - p0))
    n = max(1, math.ceil(dist / WAYPOINT_SPACING - 1e-9))
    return [p0 + (p1 - p0) * ((i + 1) / n) for i in range(n)]


def _cell_center(grid: VoxelGrid, cell: Cell) -> np.ndarray:
    return grid.cell_center(cell)


def _place_tip(grid: VoxelGrid, cell: Cell, v: np.ndarray) -> np.ndarray:
    half = np.abs(v) * grid.cell_size / 2.0
    return _cell_center(grid, cell) + v * np.linalg.norm(half)


# ---------------------------------------------------------------------------
# Waypoint construction
# ---------------------------------------------------------------------------


class _PathBuilder:
    """Per-plan waypoint factory with a cached feeder pick section."""

    def __init__(self, grid: VoxelGrid, arm: ArmModel, workspace: Workspace):
        self.grid = grid
        self.arm = arm
        self.ws = workspace
        cz = grid.cell_size[2]
        self.pick_center = workspace.feeder + np.array([0.0, 0.0, cz / 2.0])
        self.pick_tip = workspace.feeder + np.array([0.0, 0.0, cz])
        self._pick_sections: dict[float, tuple[list, np.ndarray]] = {}

    def _solve(self, pose: Pose, seed_q: np.ndarray | None) -> JointConfig:
        if seed_q is not None:
            try:
                return ik(self.arm, pose, seed_q)
            except (NoConvergence, JointLimit):
                pass
        ok, witness = reachable(self.arm, pose)
        if not ok:
            raise NoConvergence(f"no IK solution for waypoint at {pose.position}")
        return witness

    def pick_section(self, safe_z: float) -> tuple[list[Waypoint], np.ndarray]:
        """Descend from the ceiling onto the feeder, grip, lift back up."""
        key = round(safe_z, 9)
        if key in self._pick_sections:
            return self._pick_sections[key]
        top = np.array([self.pick_tip[0], self.pick_tip[1], safe_z])
        wps: list[Waypoint] = []
        q = None

        def add(name, pos, gripper=None):
            nonlocal q
            pose = Pose(np.asarray(pos, float), _DOWN)
            q = self._solve(pose, q.q if q is not None else None)
            wps.append(Waypoint(name, pose, q, gripper))

        add("pick_approach", top)
        descent = _ladder(top, self.pick_tip)
        for i, p in enumerate(descent[:-1]):
            add(f"pick_descend_{i:02d}", p)
        add("pick", self.pick_tip, gripper="close")
        ascent = _ladder(self.pick_tip, top)
        for i, p in enumerate(ascent[:-1]):
            add(f"pick_lift_{i:02d}", p)
        add("pick_lift_top", top)
        self._pick_sections[key] = (wps, q.q)
        return self._pick_sections[key]

    def step_waypoints(
        self, cell: Cell, v: np.ndarray, place_quat: np.ndarray, safe_z: float
    ) -> list[Waypoint]:
        grid, ws = self.grid, self.ws
        axis_len = float(np.abs(v * grid.cell_size).sum())
        tip = _place_tip(grid, cell, v)
        entry = tip + v * (ws.corridor_cells * axis_len)
        high_entry = np.array([entry[0], entry[1], safe_z])

        pick_wps, q_arr = self.pick_section(safe_z)
        wps = list(pick_wps)
        q = JointConfig(q_arr)

        def add(name, pos, quat, gripper=None):
            nonlocal q
            pose = Pose(np.asarray(pos, float), quat)
            q = self._solve(pose, q.q)
            wps.append(Waypoint(name, pose, q, gripper))

        start = wps[-1].pose.position
        transit = _ladder(start, high_entry)
        for i, p in enumerate(transit):
            frac = (i + 1) / len(transit)
            add(f"transit_{i:02d}", p, quat_slerp(_DOWN, place_quat, frac))
        for i, p in enumerate(_ladder(high_entry, entry)):
            add(f"descend_{i:02d}", p, place_quat)
        approach = _ladder(entry, tip)
        for i, p in enumerate(approach[:-1]):
            add(f"approach_{i:02d}", p, place_quat)
        add("place", tip, place_quat, gripper="open")
        retreat = _ladder(tip, entry) + _ladder(entry, high_entry)
        for i, p in enumerate(retreat[:-1]):
            add(f"retreat_{i:02d}", p, place_quat)
        add("place_retreat", retreat[-1], place_quat)
        return wps


# ---------------------------------------------------------------------------
# Planning
# ---------------------------------------------------------------------------


def plan_assembly(
    grid: VoxelGrid,
    arm: ArmModel,
    rule: SupportRule = SupportRule(),
    motion: MotionProfile | None = None,
    workspace: Workspace | None = None,
    max_backtracks: int = 1000,
) -> AssemblyPlan:
    """Greedy bottom-up ordering with bounded backtracking.

    The grid must already be grounded and free of overhang violations.
    Layers are completed in order; within a layer, cells adjacent to
    already-placed cells come first, then lexicographic order. Each cell
    gets the first approach direction (+z, +x, -x, +y, -y) whose corridor
    is clear, whose place pose is reachable, and whose full waypoint
    chain is collision-free against the structure built so far.
    """
    motion = motion or default_motion()
    workspace = workspace or default_workspace()
    _, report = analyze(grid, rule)
    if report.pruned_cells or not report.feasible:
        raise ValueError("grid must be grounded and overhang-free before planning")

    builder = _PathBuilder(grid, arm, workspace)
    cz = grid.cell_size[2]
    oz = float(grid.origin[2])
    total = len(grid.occupied)
    occupied = grid.occupied

    steps: list[AssemblyStep] = []
    placed: set[Cell] = set()
    frames: list[dict] = []
    backtracks = 0
    first_dead_end: tuple[Cell, str] | None = None

    def candidates() -> list[Cell]:
        unplaced = occupied - placed
        layer = min(c[2] for c in unplaced)
        in_layer = [c for c in unplaced if c[2] == layer]
        supported = [
            c
            for c in in_layer
            if c[2] == 0
            or any((c[0] + d[0], c[1] + d[1], c[2] + d[2]) in placed for d in FACE_NEIGHBORS)
        ]
        adjacent = {
            c
            for c in supported
            if any((c[0] + d[0], c[1] + d[1], c[2] + d[2]) in placed for d in FACE_NEIGHBORS)
        }
        return sorted(supported, key=lambda c: (c not in adjacent, c))

    def try_place(cell: Cell) -> tuple[AssemblyStep | None, str]:
        placed_grid = grid.replace_occupied(frozenset(placed))
        had_clear_approach = False
        top_z = oz + (max((c[2] for c in placed), default=-1) + 1 + 1) * cz
        for name, vec in APPROACH_DIRS:
            corridor = [
                (cell[0] + vec[0] * s, cell[1] + vec[1] * s, cell[2] + vec[2] * s)
                for s in range(1, workspace.corridor_cells + 1)
            ]
            if any(c in placed for c in corridor):
                continue
            had_clear_approach = True
            v = np.asarray(vec, dtype=float)
            place_quat = tool_orientation(-v)
            tip = _place_tip(grid, cell, v)
            place_pose = Pose(tip, place_quat)
            ok, witness = reachable(arm, place_pose)
            if not ok:
                continue
            if arm_collides(arm, witness, placed_grid, ignore_cell=cell):
                continue
            axis_len = float(np.abs(v * grid.cell_size).sum())
            entry_z = tip[2] + vec[2] * workspace.corridor_cells * axis_len
            safe_z = (
                max(top_z, oz + (cell[2] + 1) * cz, entry_z, builder.pick_tip[2])
                + workspace.safe_clearance
            )
            try:
                wps = builder.step_waypoints(cell, v, place_quat, safe_z)
            except (NoConvergence, JointLimit):
                continue
            if any_collision(arm, [w.q for w in wps], placed_grid, ignore_cell=cell):
                continue
            step = AssemblyStep(
                cell=cell,
                component_id=f"c{len(steps):03d}",
                pick=Pose(builder.pick_center.copy()),
                place=Pose(_cell_center(grid, cell)),
                approach_dir=name,
                witness_q=witness,
                waypoints=tuple(wps),
            )
            return step, ""
        return None, "unreachable" if had_clear_approach else "blocked"

    while len(placed) < total:
        depth = len(steps)
        if len(frames) == depth:
            cands = candidates()
            frames.append({"cands": cands, "idx": 0, "reasons": {}})
        frame = frames[depth]
        advanced = False
        while frame["idx"] < len(frame["cands"]):
            cell = frame["cands"][frame["idx"]]
            frame["idx"] += 1
            step, why = try_place(cell)
            if step is not None:
                steps.append(step)
                placed.add(cell)
                advanced = True
                break
            frame["reasons"][cell] = why
        if advanced:
            continue

        if first_dead_end is None:
            if frame["cands"]:
                cell = frame["cands"][0]
                first_dead_end = (cell, frame["reasons"][cell])
            else:
                unplaced = occupied - placed
                layer = min(c[2] for c in unplaced)
                first_dead_end = (min(c for c in unplaced if c[2] == layer), "unsupported")
        backtracks += 1
        if not steps or backtracks > max_backtracks:
            cell, why = first_dead_end
            raise Unplannable(
                f"cannot place cell {cell}: {why} (after {backtracks - 1} reorderings)",
                cell=cell,
                reason=why,
            )
        frames.pop()
        undone = steps.pop()
        placed.discard(undone.cell)

    plan = AssemblyPlan(steps=tuple(steps), grid=grid, estimated_duration=0.0)
    return AssemblyPlan(
        steps=plan.steps, grid=grid, estimated_duration=estimate_duration(plan, motion)
    )


# ---------------------------------------------------------------------------
# Independent replay validation
# ---------------------------------------------------------------------------

_POSE_POS_TOL = 1e-3
_POSE_ORI_TOL = 1e-2


def validate_plan(
    plan: AssemblyPlan,
    arm: ArmModel,
    rule: SupportRule = SupportRule(),
    workspace: Workspace | None = None,
) -> list[str]:
    """Replay the plan and report every violated guarantee.

    Rechecks, per step: support at placement time, grounded connectivity
    of the prefix, approach corridor clearance, reachability of the place
    pose via the stored witness, collision of witness and waypoints
    against the structure built so far, and waypoint spacing/consistency.
    At most one violation is reported per step (the first found); plan
    level problems (coverage, duplicates) are reported separately.
    """
    workspace = workspace or default_workspace()
    violations: list[str] = []
    grid = plan.grid
    occupied = grid.occupied

    cells = [s.cell for s in plan.steps]
    seen = set()
    for s in plan.steps:
        if s.cell in seen:
            violations.append(f"plan: cell {s.cell} placed more than once")
        seen.add(s.cell)
        if s.cell not in occupied:
            violations.append(f"plan: cell {s.cell} not occupied in the grid")
    missing = occupied - seen
    if missing:
        violations.append(f"plan: {len(missing)} occupied cells never placed")

    placed: set[Cell] = set()
    for idx, step in enumerate(plan.steps, start=1):
        violation = replay_step(step, idx, placed, grid, arm, workspace)
        if violation:
            violations.append(violation)
        placed.add(step.cell)
    return violations


def _neighbors(cell: Cell):
    for d in FACE_NEIGHBORS:
        yield (cell[0] + d[0], cell[1] + d[1], cell[2] + d[2])


def _prefix_grounded(placed: set[Cell]) -> bool:
    if not placed:
        return True
    seeds = [c for c in placed if c[2] == 0]
    seen = set(seeds)
    stack = list(seeds)
    while stack:
        cur = stack.pop()
        for nb in _neighbors(cur):
            if nb in placed and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(placed)


def replay_step(step, idx, placed, grid, arm, workspace=None) -> str | None:
    """Recheck a single step against the cells placed so far.

    Returns None when every guarantee holds, otherwise a message naming
    the first violated one. ``idx`` is the 1-based step number used in
    the message.
    """
    workspace = workspace or default_workspace()
    cell = step.cell

    supported = cell[2] == 0 or any(nb in placed for nb in _neighbors(cell))
    if not supported:
        return f"step {idx}: support violation at cell {cell}"

    if not _prefix_grounded(placed | {cell}):
        return f"step {idx}: prefix connectivity violation after cell {cell}"

    if step.approach_dir not in _APPROACH_VECTORS:
        return f"step {idx}: unknown approach direction {step.approach_dir!r}"
    vec = _APPROACH_VECTORS[step.approach_dir]
    corridor = [
        (cell[0] + vec[0] * s, cell[1] + vec[1] * s, cell[2] + vec[2] * s)
        for s in range(1, workspace.corridor_cells + 1)
    ]
    blocked = [c for c in corridor if c in placed]
    if blocked:
        return f"step {idx}: approach corridor blocked at {blocked[0]}"

    center = grid.cell_center(cell)
    if float(np.linalg.norm(step.place.position - center)) > 1e-6:
        return f"step {idx}: place pose does not center the component in cell {cell}"

    v = np.asarray(vec, dtype=float)
    expected_tip = _place_tip(grid, cell, v)
    tool = fk(arm, step.witness_q)
    if not arm.within_limits(step.witness_q):
        return f"step {idx}: witness config outside joint limits"
    if float(np.linalg.norm(tool.position - expected_tip)) > _POSE_POS_TOL:
        return f"step {idx}: witness does not reach the place pose"
    tool_axis = tool.rotation[:, 2]
    if float(np.dot(tool_axis, -v)) < math.cos(_POSE_ORI_TOL):
        return f"step {idx}: witness tool axis not aligned with approach"

    placed_grid = grid.replace_occupied(frozenset(placed))
    configs = [step.witness_q] + [w.q for w in step.waypoints]
    if any_collision(arm, configs, placed_grid, ignore_cell=cell):
        return f"step {idx}: collision along the toolpath"

    if not step.waypoints:
        return f"step {idx}: no waypoints"
    if step.waypoints[0].name != "pick_approach" or step.waypoints[-1].name != "place_retreat":
        return f"step {idx}: waypoints must run pick_approach..place_retreat"
    prev = None
    for w in step.waypoints:
        if not arm.within_limits(w.q):
            return f"step {idx}: waypoint {w.name} outside joint limits"
        actual = fk(arm, w.q)
        if float(np.linalg.norm(actual.position - w.pose.position)) > _POSE_POS_TOL:
            return f"step {idx}: waypoint {w.name} joint config misses its pose"
        if prev is not None:
            gap = float(np.linalg.norm(w.pose.position - prev.pose.position))
            if gap > WAYPOINT_SPACING + 1e-6:
                return f"step {idx}: waypoint spacing {gap:.3f} m exceeds {WAYPOINT_SPACING} m"
        prev = w
    return None


# ---------------------------------------------------------------------------
# Duration and disassembly
# ---------------------------------------------------------------------------


def estimate_duration(plan: AssemblyPlan, profile: MotionProfile) -> float:
    """Trapezoidal joint-space time over all legs plus gripper dwells.

    Legs span step boundaries, so concatenating two plans adds exactly
    one transit leg beyond the sum of the parts.
    """
    qs = [w.q.q for step in plan.steps for w in step.waypoints]
    total = 0.0
    if len(qs) > 1:
        dq = np.diff(np.asarray(qs), axis=0)
        total += float(profile.leg_times(dq).sum())
    for step in plan.steps:
        for w in step.waypoints:
            if w.gripper == "close":
                total += profile.pick_dwell
            elif w.gripper == "open":
                total += profile.place_dwell
    return total


def plan_disassembly(plan: AssemblyPlan) -> list[Cell]:
    """Removal order: exact reverse of assembly, replay-checked.

    Because every assembly prefix is grounded and supported, removing in
    reverse keeps the remainder valid at every point; this replays the
    removals to verify it.
    """
    order = [s.cell for s in reversed(plan.steps)]
    remaining = set(plan.grid.occupied)
    for cell in order:
        if cell not in remaining:
            raise ValueError(f"cell {cell} not present at its removal point")
        remaining.remove(cell)
        if not _prefix_grounded(remaining):
            raise ValueError(f"removing {cell} leaves a floating remainder")
    return order


# ---------------------------------------------------------------------------
# Toolpath serialization (the hardware boundary)
# ---------------------------------------------------------------------------

TOOLPATH_VERSION = 1


def plan_to_dict(plan: AssemblyPlan, motion: MotionProfile | None = None) -> dict:
    """Toolpath document: ordered steps, named waypoints with joint
    witnesses and gripper events, and per-leg time estimates.

    ``leg_times[i]`` of a step is the travel time arriving at waypoint i;
    the first entry of each step covers the leg from the previous step's
    last waypoint (0.0 for the very first waypoint of the plan).
    """
    motion = motion or default_motion()
    steps = []
    prev_q: np.ndarray | None = None
    for step in plan.steps:
        leg_times = []
        for w in step.waypoints:
            if prev_q is None:
                leg_times.append(0.0)
            else:
                leg_times.append(float(motion.leg_times((w.q.q - prev_q)[None, :])[0]))
            prev_q = w.q.q
        steps.append(
            {
                "cell": list(step.cell),
                "component_id": step.component_id,
                "pick": step.pick.to_dict(),
                "place": step.place.to_dict(),
                "approach_dir": step.approach_dir,
                "witness_q": step.witness_q.tolist(),
                "waypoints": [
                    {
                        "name": w.name,
                        "pose": w.pose.to_dict(),
                        "q": w.q.tolist(),
                        "gripper": w.gripper,
                    }
                    for w in step.waypoints
                ],
                "leg_times": leg_times,
            }
        )
    return {
        "version": TOOLPATH_VERSION,
        "grid": grid_to_dict(plan.grid),
        "estimated_duration": plan.estimated_duration,
        "steps": steps,
    }


def plan_from_dict(doc: dict) -> AssemblyPlan:
    if doc.get("version") != TOOLPATH_VERSION:
        raise ValueError(f"unsupported toolpath version {doc.get('version')!r}")
    grid = grid_from_dict(doc["grid"])
    steps = []
    for s in doc["steps"]:
        steps.append(
            AssemblyStep(
                cell=tuple(s["cell"]),
                component_id=s["component_id"],
                pick=Pose.from_dict(s["pick"]),
                place=Pose.from_dict(s["place"]),
                approach_dir=s["approach_dir"],
                witness_q=JointConfig(np.asarray(s["witness_q"], float)),
                waypoints=tuple(
                    Waypoint(
                        name=w["name"],
                        pose=Pose.from_dict(w["pose"]),
                        q=JointConfig(np.asarray(w["q"], float)),
                        gripper=w.get("gripper"),
                    )
                    for w in s["waypoints"]
                ),
            )
        )
    return AssemblyPlan(
        steps=tuple(steps), grid=grid, estimated_duration=float(doc["estimated_duration"])
    )
