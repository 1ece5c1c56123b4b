"""Six-axis serial arm model: FK, damped-least-squares IK, collision tests.

The arm is described by classic Denavit-Hartenberg rows plus a base pose
and tool offset, all loaded from an editable JSON profile (the shipped
UR10-like numbers are configuration, not vendor truth). IK is numeric so
any 6-axis profile works unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import JointLimit, NoConvergence
from .voxel import VoxelGrid

# ---------------------------------------------------------------------------
# Rotation helpers (w, x, y, z quaternions throughout)
# ---------------------------------------------------------------------------


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n == 0:
        raise ValueError("zero quaternion")
    q = q / n
    return -q if q[0] < 0 else q  # canonical hemisphere


def quat_to_matrix(q) -> np.ndarray:
    w, x, y, z = quat_normalize(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def matrix_to_quat(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    t = np.trace(m)
    if t > 0:
        s = math.sqrt(t + 1.0) * 2
        q = np.array(
            [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        )
    else:
        i = int(np.argmax(np.diag(m)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = math.sqrt(max(1.0 + m[i, i] - m[j, j] - m[k, k], 0.0)) * 2
        q = np.empty(4)
        q[0] = (m[k, j] - m[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (m[j, i] + m[i, j]) / s
        q[1 + k] = (m[k, i] + m[i, k]) / s
    return quat_normalize(q)


def rotation_vector(m) -> np.ndarray:
    """Axis-angle vector of a rotation matrix (angle in [0, pi])."""
    m = np.asarray(m, dtype=float)
    cos_a = np.clip((np.trace(m) - 1.0) / 2.0, -1.0, 1.0)
    angle = math.acos(cos_a)
    if angle < 1e-12:
        return np.zeros(3)
    axis_raw = np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
    if math.pi - angle < 1e-6:
        # Near pi the antisymmetric part vanishes; recover the axis from
        # the symmetric part instead.
        d = np.sqrt(np.maximum((np.diag(m) + 1.0) / 2.0, 0.0))
        axis = d / (np.linalg.norm(d) or 1.0)
        # fix signs using the off-diagonal terms
        if m[0, 1] + m[1, 0] < 0:
            axis[1] = -axis[1]
        if m[0, 2] + m[2, 0] < 0:
            axis[2] = -axis[2]
        return axis * angle
    return axis_raw / (2.0 * math.sin(angle)) * angle


def quat_slerp(qa, qb, t: float) -> np.ndarray:
    qa = quat_normalize(qa)
    qb = quat_normalize(qb)
    dot = float(np.dot(qa, qb))
    if dot < 0:
        qb, dot = -qb, -dot
    if dot > 1 - 1e-10:
        return quat_normalize(qa + t * (qb - qa))
    theta = math.acos(min(dot, 1.0))
    return quat_normalize(
        (math.sin((1 - t) * theta) * qa + math.sin(t * theta) * qb) / math.sin(theta)
    )


@dataclass(frozen=True)
class Pose:
    """Rigid pose: position in meters, unit quaternion orientation."""

    position: np.ndarray
    orientation: np.ndarray = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        quat = np.asarray(self.orientation, dtype=float)
        if pos.shape != (3,):
            raise ValueError("position must be a 3-vector")
        if quat.shape != (4,):
            raise ValueError("orientation must be a (w, x, y, z) quaternion")
        if abs(np.linalg.norm(quat) - 1.0) > 1e-9:
            raise ValueError(f"quaternion norm {np.linalg.norm(quat)} not 1 within 1e-9")
        pos.setflags(write=False)
        quat = quat_normalize(quat)
        quat.setflags(write=False)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "orientation", quat)

    @property
    def rotation(self) -> np.ndarray:
        return quat_to_matrix(self.orientation)

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.position
        return m

    @classmethod
    def from_matrix(cls, m) -> "Pose":
        m = np.asarray(m, dtype=float)
        return cls(m[:3, 3].copy(), matrix_to_quat(m[:3, :3]))

    def to_dict(self) -> dict:
        return {
            "position": [float(x) for x in self.position],
            "orientation": [float(x) for x in self.orientation],
        }

    @classmethod
    def from_dict(cls, d) -> "Pose":
        return cls(np.asarray(d["position"], float), np.asarray(d["orientation"], float))


@dataclass(frozen=True)
class JointConfig:
    """Six joint angles in radians."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (6,):
            raise ValueError("expected 6 joint angles")
        if not np.all(np.isfinite(q)):
            raise ValueError("joint angles must be finite")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    def tolist(self) -> list[float]:
        return [float(x) for x in self.q]


def _as_q(config) -> np.ndarray:
    return config.q if isinstance(config, JointConfig) else np.asarray(config, dtype=float)


@dataclass(frozen=True)
class ArmModel:
    """Classic-DH 6R arm with capsule link geometry.

    ``dh_rows`` is (6, 4): a, alpha, d, theta_offset per joint.
    ``seed_configs`` are the spread configurations tried by
    :func:`reachable`, in order.
    """

    dh_rows: np.ndarray
    joint_limits: np.ndarray
    base_pose: Pose = Pose(np.zeros(3))
    tool_offset: Pose = Pose(np.zeros(3))
    link_radius: float = 0.03
    seed_configs: np.ndarray = field(default_factory=lambda: np.zeros((1, 6)))
    name: str = "arm"

    def __post_init__(self):
        dh = np.asarray(self.dh_rows, dtype=float)
        lim = np.asarray(self.joint_limits, dtype=float)
        seeds = np.atleast_2d(np.asarray(self.seed_configs, dtype=float))
        if dh.shape != (6, 4):
            raise ValueError("dh_rows must be (6, 4): a, alpha, d, theta_offset")
        if lim.shape != (6, 2) or np.any(lim[:, 0] >= lim[:, 1]):
            raise ValueError("joint_limits must be 6 (min, max) pairs with min < max")
        if self.link_radius <= 0:
            raise ValueError("link_radius must be positive")
        if seeds.shape[1] != 6:
            raise ValueError("seed_configs must be (S, 6)")
        for arr in (dh, lim, seeds):
            arr.setflags(write=False)
        object.__setattr__(self, "dh_rows", dh)
        object.__setattr__(self, "joint_limits", lim)
        object.__setattr__(self, "seed_configs", seeds)

    def within_limits(self, config) -> bool:
        q = _as_q(config)
        return bool(np.all(q >= self.joint_limits[:, 0]) and np.all(q <= self.joint_limits[:, 1]))


# ---------------------------------------------------------------------------
# Forward kinematics
# ---------------------------------------------------------------------------


def _chain(arm: ArmModel, q: np.ndarray):
    """World-frame joint transforms T0..T6 plus the tool frame.

    Returns (origins (8, 3): base, joints 1-6, tool tip; z_axes (6, 3):
    rotation axis of each joint; tool transform (4, 4)).
    """
    a = arm.dh_rows[:, 0]
    alpha = arm.dh_rows[:, 1]
    d = arm.dh_rows[:, 2]
    theta = q + arm.dh_rows[:, 3]
    ct, st = np.cos(theta), np.sin(theta)
    ca, sa = np.cos(alpha), np.sin(alpha)

    T = arm.base_pose.matrix()
    origins = np.empty((8, 3))
    z_axes = np.empty((6, 3))
    origins[0] = T[:3, 3]
    for i in range(6):
        z_axes[i] = T[:3, 2]  # joint i+1 rotates about z of the previous frame
        step = np.array(
            [
                [ct[i], -st[i] * ca[i], st[i] * sa[i], a[i] * ct[i]],
                [st[i], ct[i] * ca[i], -ct[i] * sa[i], a[i] * st[i]],
                [0.0, sa[i], ca[i], d[i]],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )
        T = T @ step
        origins[i + 1] = T[:3, 3]
    T_tool = T @ arm.tool_offset.matrix()
    origins[7] = T_tool[:3, 3]
    return origins, z_axes, T_tool


def fk(arm: ArmModel, config) -> Pose:
    """Tool-tip pose for a joint configuration."""
    _, _, T_tool = _chain(arm, _as_q(config))
    return Pose.from_matrix(T_tool)


def jacobian(arm: ArmModel, config) -> np.ndarray:
    """Geometric Jacobian of the tool tip, world frame: rows [v; omega]."""
    origins, z_axes, T_tool = _chain(arm, _as_q(config))
    tip = T_tool[:3, 3]
    J = np.empty((6, 6))
    J[:3, :] = np.cross(z_axes, tip - origins[:6]).T
    J[3:, :] = z_axes.T
    return J


# ---------------------------------------------------------------------------
# Inverse kinematics
# ---------------------------------------------------------------------------

IK_POS_TOL = 1e-4
IK_ORI_TOL = 1e-3
IK_MAX_ITERS = 200
IK_DAMPING = 1e-3
IK_STEP_CLAMP = 0.2


def ik(
    arm: ArmModel,
    target: Pose,
    seed,
    pos_tol: float = IK_POS_TOL,
    ori_tol: float = IK_ORI_TOL,
    max_iters: int = IK_MAX_ITERS,
) -> JointConfig:
    """Damped least-squares IK on the 6D pose error.

    The orientation residual is the rotation vector of
    R_target @ R_current^T. Raises :class:`NoConvergence` with the best
    configuration found, or :class:`JointLimit` when the converged
    solution cannot be folded into the arm's limits by 2*pi shifts.
    """
    q = _as_q(seed).copy()
    R_target = target.rotation
    p_target = target.position
    damping_sq = IK_DAMPING**2
    best_q, best_err = q.copy(), math.inf

    for _ in range(max_iters + 1):
        origins, z_axes, T_tool = _chain(arm, q)
        e_pos = p_target - T_tool[:3, 3]
        e_rot = rotation_vector(R_target @ T_tool[:3, :3].T)
        pos_err = float(np.linalg.norm(e_pos))
        ori_err = float(np.linalg.norm(e_rot))
        if pos_err + ori_err < best_err:
            best_q, best_err = q.copy(), pos_err + ori_err
        if pos_err <= pos_tol and ori_err <= ori_tol:
            return _fold_into_limits(arm, q, pos_err, ori_err)

        J = np.empty((6, 6))
        J[:3, :] = np.cross(z_axes, T_tool[:3, 3] - origins[:6]).T
        J[3:, :] = z_axes.T
        e = np.concatenate([e_pos, e_rot])
        JJt = J @ J.T
        JJt[np.diag_indices_from(JJt)] += damping_sq
        dq = J.T @ np.linalg.solve(JJt, e)
        q = q + np.clip(dq, -IK_STEP_CLAMP, IK_STEP_CLAMP)

    raise NoConvergence(
        f"IK stalled after {max_iters} iterations (best combined error {best_err:.2e})",
        best_q=JointConfig(best_q),
    )


def _fold_into_limits(arm, q, pos_err, ori_err) -> JointConfig:
    lo, hi = arm.joint_limits[:, 0], arm.joint_limits[:, 1]
    folded = q.copy()
    for i in range(6):
        while folded[i] > hi[i]:
            folded[i] -= 2 * math.pi
        while folded[i] < lo[i]:
            folded[i] += 2 * math.pi
        if folded[i] > hi[i]:
            raise JointLimit(
                f"joint {i + 1} solution {q[i]:.3f} rad cannot fit limits "
                f"[{lo[i]:.3f}, {hi[i]:.3f}] (pos_err={pos_err:.1e}, ori_err={ori_err:.1e})"
            )
    return JointConfig(folded)


def reachable(arm: ArmModel, target: Pose, seeds=None) -> tuple[bool, JointConfig | None]:
    """Try IK from each seed in order; first success is the witness."""
    if seeds is None:
        seeds = arm.seed_configs
    seeds = np.atleast_2d(np.asarray([_as_q(s) for s in seeds], dtype=float))
    if len(seeds) == 0:
        raise ValueError("seeds must be nonempty")
    for seed in seeds:
        try:
            return True, ik(arm, target, seed)
        except (NoConvergence, JointLimit):
            continue
    return False, None


# ---------------------------------------------------------------------------
# Collision
# ---------------------------------------------------------------------------


def _segment_box_distances(p0, p1, box_min, box_max, iters: int = 40) -> np.ndarray:
    """Min distance from S segments to B boxes, shape (S, B).

    Point-to-box distance is convex along the segment parameter, so a
    vectorized ternary search converges geometrically; 40 rounds shrink
    the bracket below 1e-7 of segment length.
    """
    seg = (p1 - p0)[:, None, :]
    start = p0[:, None, :]

    def dist_at(t):
        # t: (S, B) parameter per segment/box pair
        p = start + t[..., None] * seg
        d = np.maximum(np.maximum(box_min[None, :, :] - p, p - box_max[None, :, :]), 0.0)
        return np.sqrt(np.einsum("sbk,sbk->sb", d, d))

    lo = np.zeros((len(p0), len(box_min)))
    hi = np.ones_like(lo)
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        shrink_hi = dist_at(m1) < dist_at(m2)
        hi = np.where(shrink_hi, m2, hi)
        lo = np.where(shrink_hi, lo, m1)
    return dist_at((lo + hi) / 2.0)


def _cell_boxes(placed: VoxelGrid, ignore_cell):
    cells = [c for c in placed.occupied if c != ignore_cell]
    if not cells:
        return None, None
    arr = np.asarray(cells, dtype=float)
    box_min = placed.origin + arr * placed.cell_size
    return box_min, box_min + placed.cell_size


def arm_collides(arm: ArmModel, config, placed: VoxelGrid, ignore_cell=None) -> bool:
    """True when any link capsule intersects an occupied cell's box.

    ``ignore_cell`` excludes the component currently held in the gripper.
    """
    box_min, box_max = _cell_boxes(placed, ignore_cell)
    if box_min is None:
        return False
    origins, _, _ = _chain(arm, _as_q(config))
    dists = _segment_box_distances(origins[:-1], origins[1:], box_min, box_max)
    return bool(np.any(dists < arm.link_radius))


def any_collision(arm: ArmModel, configs, placed: VoxelGrid, ignore_cell=None) -> bool:
    """arm_collides over many configurations in one batched distance query."""
    box_min, box_max = _cell_boxes(placed, ignore_cell)
    if box_min is None:
        return False
    segs0, segs1 = [], []
    for config in configs:
        origins, _, _ = _chain(arm, _as_q(config))
        segs0.append(origins[:-1])
        segs1.append(origins[1:])
    p0 = np.concatenate(segs0)
    p1 = np.concatenate(segs1)
    return bool(np.any(_segment_box_distances(p0, p1, box_min, box_max) < arm.link_radius))


# ---------------------------------------------------------------------------
# Profile loading
# ---------------------------------------------------------------------------

DEFAULT_PROFILE = Path(__file__).parent / "profiles" / "ur10_like.json"


def load_arm_profile(path=None) -> ArmModel:
    """Build an :class:`ArmModel` from a JSON profile file."""
    raw = load_profile_dict(path)
    return ArmModel(
        dh_rows=np.array(
            [[r["a"], r["alpha"], r["d"], r.get("theta_offset", 0.0)] for r in raw["dh"]]
        ),
        joint_limits=np.array(raw["joint_limits"], dtype=float),
        base_pose=Pose.from_dict(raw["base_pose"]),
        tool_offset=Pose.from_dict(raw["tool_offset"]),
        link_radius=float(raw["link_radius"]),
        seed_configs=np.array(raw["seed_configs"], dtype=float),
        name=raw.get("name", "arm"),
    )


def load_profile_dict(path=None) -> dict:
    path = Path(path) if path is not None else DEFAULT_PROFILE
    with open(path) as fh:
        return json.load(fh)
