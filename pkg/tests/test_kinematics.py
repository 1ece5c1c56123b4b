"""Arm model: FK against closed-form oracles, IK round trips, collision."""

import dataclasses
import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

import oracles
from conftest import make_grid
from promptfab.errors import JointLimit, NoConvergence
from promptfab.kinematics import (
    ArmModel,
    JointConfig,
    Pose,
    any_collision,
    arm_collides,
    fk,
    ik,
    jacobian,
    load_arm_profile,
    load_profile_dict,
    matrix_to_quat,
    quat_slerp,
    quat_to_matrix,
    reachable,
    rotation_vector,
)
from promptfab.voxel import VoxelGrid

RNG = np.random.default_rng(20260814)


def random_configs(n, lo=-2 * np.pi, hi=2 * np.pi, rng=None):
    rng = rng or np.random.default_rng(11)
    return rng.uniform(lo, hi, (n, 6))


# ---------------------------------------------------------------------------
# quaternion plumbing vs scipy
# ---------------------------------------------------------------------------


def test_quat_to_matrix_matches_scipy():
    rng = np.random.default_rng(3)
    for _ in range(50):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        ours = quat_to_matrix(q)
        theirs = Rotation.from_quat([q[1], q[2], q[3], q[0]]).as_matrix()
        assert np.allclose(ours, theirs, atol=1e-12)


def test_matrix_to_quat_round_trip():
    rng = np.random.default_rng(4)
    for _ in range(50):
        m = Rotation.random(random_state=rng).as_matrix()
        q = matrix_to_quat(m)
        assert np.allclose(quat_to_matrix(q), m, atol=1e-9)
        assert abs(np.linalg.norm(q) - 1) < 1e-12


def test_rotation_vector_matches_scipy():
    rng = np.random.default_rng(5)
    for _ in range(50):
        r = Rotation.random(random_state=rng)
        ours = rotation_vector(r.as_matrix())
        assert np.allclose(ours, r.as_rotvec(), atol=1e-8)


def test_slerp_endpoints_and_midpoint():
    qa = np.array([1.0, 0.0, 0.0, 0.0])
    qb = Rotation.from_rotvec([0, 0, 1.0]).as_quat()  # xyzw
    qb = np.array([qb[3], qb[0], qb[1], qb[2]])
    assert np.allclose(quat_slerp(qa, qb, 0.0), qa)
    assert np.allclose(np.abs(quat_slerp(qa, qb, 1.0)), np.abs(qb))
    mid = quat_slerp(qa, qb, 0.5)
    ang = Rotation.from_matrix(quat_to_matrix(mid)).magnitude()
    assert abs(ang - 0.5) < 1e-9


def test_pose_validation():
    with pytest.raises(ValueError):
        Pose(np.zeros(2))
    with pytest.raises(ValueError):
        Pose(np.zeros(3), (1.0, 0.0, 0.1, 0.0))  # norm off by > 1e-9
    with pytest.raises(ValueError):
        JointConfig(np.array([0.0, np.nan, 0, 0, 0, 0]))


def test_arm_model_validation(arm):
    with pytest.raises(ValueError):
        ArmModel(dh_rows=np.zeros((5, 4)), joint_limits=arm.joint_limits)
    bad_limits = arm.joint_limits.copy()
    bad_limits[2] = (1.0, 1.0)
    with pytest.raises(ValueError):
        ArmModel(dh_rows=arm.dh_rows, joint_limits=bad_limits)
    with pytest.raises(ValueError):
        ArmModel(dh_rows=arm.dh_rows, joint_limits=arm.joint_limits, link_radius=0)


# ---------------------------------------------------------------------------
# forward kinematics
# ---------------------------------------------------------------------------


def test_fk_zero_config_golden(arm):
    """Hand-computed product of the six zero-angle transforms."""
    bare = dataclasses.replace(
        arm, base_pose=Pose(np.zeros(3)), tool_offset=Pose(np.zeros(3))
    )
    pose = fk(bare, np.zeros(6))
    assert np.allclose(pose.position, [-1.1843, -0.256141, 0.0116], atol=1e-9)
    assert np.allclose(
        pose.orientation, [math.sqrt(0.5), math.sqrt(0.5), 0.0, 0.0], atol=1e-9
    )


def test_fk_zero_config_with_base_and_tool(arm):
    pose = fk(arm, np.zeros(6))
    assert np.allclose(pose.position, [-0.4343, -0.406141, 0.0116], atol=1e-9)


def test_fk_matches_batched_oracle(arm, profile_dict):
    qs = random_configs(100)
    pos, rot = oracles.batch_fk(profile_dict, qs)
    for q, p_exp, r_exp in zip(qs, pos, rot):
        pose = fk(arm, q)
        assert np.allclose(pose.position, p_exp, atol=1e-10)
        assert np.allclose(pose.rotation, r_exp, atol=1e-10)


def test_joint1_pi_mirrors_through_base_axis(arm):
    """Joint 1 spins the whole chain about the base z-axis."""
    base = arm.base_pose.position
    for q in random_configs(10, rng=np.random.default_rng(6)):
        q2 = q.copy()
        q2[0] += np.pi
        p1 = fk(arm, q).position - base
        p2 = fk(arm, q2).position - base
        assert np.allclose(p2, [-p1[0], -p1[1], p1[2]], atol=1e-9)


def test_joint6_rotation_keeps_tool_position(arm):
    """Tool offset lies along the last joint axis, so position holds."""
    for q in random_configs(10, rng=np.random.default_rng(7)):
        q2 = q.copy()
        q2[5] += 1.234
        assert np.allclose(fk(arm, q).position, fk(arm, q2).position, atol=1e-10)


def test_fk_deterministic(arm):
    q = np.array([0.3, -1.1, 1.2, -1.8, -1.4, 0.4])
    a, b = fk(arm, q), fk(arm, q)
    assert np.array_equal(a.position, b.position)
    assert np.array_equal(a.orientation, b.orientation)


def test_fk_continuity(arm):
    """1e-6 rad of joint motion moves the tool far less than 1e-3 m."""
    rng = np.random.default_rng(8)
    for q in random_configs(100, rng=rng):
        dq = rng.uniform(-1e-6, 1e-6, 6)
        d = np.linalg.norm(fk(arm, q + dq).position - fk(arm, q).position)
        assert d <= 1e-3


def test_jacobian_matches_finite_differences(arm):
    h = 1e-6
    for q in random_configs(20, rng=np.random.default_rng(9)):
        J = jacobian(arm, q)
        J_fd = np.empty((6, 6))
        for i in range(6):
            qp, qm = q.copy(), q.copy()
            qp[i] += h
            qm[i] -= h
            pp, pm = fk(arm, qp), fk(arm, qm)
            J_fd[:3, i] = (pp.position - pm.position) / (2 * h)
            dR = pp.rotation @ pm.rotation.T
            J_fd[3:, i] = rotation_vector(dR) / (2 * h)
        rel = np.linalg.norm(J_fd - J) / np.linalg.norm(J)
        assert rel <= 1e-5


# ---------------------------------------------------------------------------
# inverse kinematics
# ---------------------------------------------------------------------------


def test_ik_fixed_point(arm):
    q0 = np.array([0.3, -1.1, 1.2, -1.8, -1.4, 0.4])
    result = ik(arm, fk(arm, q0), q0)
    assert np.array_equal(result.q, q0)


def test_ik_round_trip_small_perturbation(arm):
    rng = np.random.default_rng(10)
    lo, hi = arm.joint_limits[:, 0], arm.joint_limits[:, 1]
    ok = 0
    for _ in range(50):
        q0 = rng.uniform(lo, hi)
        target = fk(arm, q0 + rng.uniform(-0.05, 0.05, 6))
        try:
            q = ik(arm, target, q0)
        except (NoConvergence, JointLimit):
            continue
        got = fk(arm, q)
        pos_err = np.linalg.norm(got.position - target.position)
        ori_err = np.linalg.norm(
            rotation_vector(target.rotation @ got.rotation.T)
        )
        assert arm.within_limits(q)
        if pos_err <= 1e-3 and ori_err <= 1e-2:
            ok += 1
    assert ok >= 48


def test_ik_unreachable_raises_with_best_effort(arm):
    with pytest.raises(NoConvergence) as exc_info:
        ik(arm, Pose(np.array([10.0, 0.0, 0.0])), np.zeros(6))
    assert isinstance(exc_info.value.best_q, JointConfig)


def test_ik_joint_limit_on_unfoldable_solution(arm):
    """Seeded at the exact solution, but the limits exclude it."""
    q_out = np.array([np.pi / 2, -1.1, 1.2, -1.8, -1.4, 0.4])
    narrow = arm.joint_limits.copy()
    narrow[0] = (-0.1, 0.1)
    tight = dataclasses.replace(arm, joint_limits=narrow)
    with pytest.raises(JointLimit):
        ik(tight, fk(arm, q_out), q_out)


def test_ik_folds_out_of_range_solution_into_limits(arm):
    """A solution at q1 + 2pi folds back inside the +-2pi limits."""
    q0 = np.array([0.3, -1.1, 1.2, -1.8, -1.4, 0.4])
    seed = q0.copy()
    seed[0] += 2 * np.pi  # converges near the shifted angle
    result = ik(arm, fk(arm, q0), seed)
    assert arm.within_limits(result)


# ---------------------------------------------------------------------------
# reachability
# ---------------------------------------------------------------------------


def test_reachable_mid_range_pose(arm):
    target = fk(arm, np.array([0.25, -1.05, 1.3, -1.9, -1.5, 0.3]))
    ok, witness = reachable(arm, target)
    assert ok
    got = fk(arm, witness)
    assert np.linalg.norm(got.position - target.position) <= 1e-3


def test_reachable_far_pose_false(arm):
    ok, witness = reachable(arm, Pose(np.array([10.0, 0.0, 0.0])))
    assert not ok
    assert witness is None


def test_reachable_requires_seeds(arm):
    with pytest.raises(ValueError):
        reachable(arm, Pose(np.zeros(3)), seeds=[])


def test_restricted_wrist_cannot_point_tool_up(arm, profile_dict):
    """Clamp the wrist and ask for an upside-down tool at plate center.

    The dense FK sweep over the three free joints shows every reachable
    orientation sits at least 1.5 rad away, so reachable() must say no.
    """
    narrow = arm.joint_limits.copy()
    narrow[3] = (-0.001, 0.001)
    narrow[4] = (-0.001, 0.001)
    narrow[5] = (-0.001, 0.001)
    clamped = dataclasses.replace(arm, joint_limits=narrow)
    target = Pose(np.array([0.0, 0.0, 0.2]))  # identity: tool z up

    n = 100
    grid = np.linspace(-2 * np.pi, 2 * np.pi, n)
    worst = np.inf
    for q1 in grid:
        qs = np.zeros((n * n, 6))
        pair = np.stack(np.meshgrid(grid, grid, indexing="ij"), -1).reshape(-1, 2)
        qs[:, 0] = q1
        qs[:, 1] = pair[:, 0]
        qs[:, 2] = pair[:, 1]
        _, rot = oracles.batch_fk(profile_dict, qs)
        m = np.swapaxes(rot, 1, 2)  # target is identity: angle of R^T
        tr = np.clip((m[:, 0, 0] + m[:, 1, 1] + m[:, 2, 2] - 1) / 2, -1, 1)
        worst = min(worst, float(np.arccos(tr).min()))
    assert worst > 1.5  # oracle: nothing comes close

    ok, _ = reachable(clamped, target)
    assert not ok


# ---------------------------------------------------------------------------
# collision
# ---------------------------------------------------------------------------


def empty_grid():
    return VoxelGrid(
        origin=np.zeros(3),
        cell_size=np.full(3, 0.05),
        dims=(2, 2, 2),
        occupied=frozenset(),
    )


def tip_box_grid(profile_dict, q, gap):
    """One cell directly below the tool tip with the given vertical gap."""
    tip = oracles.chain_origins(profile_dict, q)[-1]
    cell = 0.05
    box_min = np.array([tip[0] - cell / 2, tip[1] - cell / 2, tip[2] - gap - cell])
    return VoxelGrid(
        origin=box_min, cell_size=np.full(3, cell), dims=(1, 1, 1),
        occupied=frozenset({(0, 0, 0)}),
    )


def test_empty_grid_never_collides(arm):
    for q in random_configs(5, rng=np.random.default_rng(12)):
        assert not arm_collides(arm, q, empty_grid())


def test_link_through_cell_center_collides(arm, profile_dict):
    q = arm.seed_configs[0]
    tip = oracles.chain_origins(profile_dict, q)[-1]
    grid = VoxelGrid(
        origin=tip - 0.025, cell_size=np.full(3, 0.05), dims=(1, 1, 1),
        occupied=frozenset({(0, 0, 0)}),
    )
    assert arm_collides(arm, q, grid)


def test_clearance_just_outside_radius(arm, profile_dict):
    q = arm.seed_configs[0]
    grid = tip_box_grid(profile_dict, q, arm.link_radius + 0.001)
    origins = oracles.chain_origins(profile_dict, q)
    box_min = grid.origin
    box_max = grid.origin + grid.cell_size
    d = min(
        oracles.segment_box_distance_dense(origins[i], origins[i + 1], box_min, box_max)
        for i in range(len(origins) - 1)
    )
    assert abs(d - (arm.link_radius + 0.001)) < 2e-4
    assert not arm_collides(arm, q, grid)


def test_contact_just_inside_radius(arm, profile_dict):
    q = arm.seed_configs[0]
    grid = tip_box_grid(profile_dict, q, arm.link_radius - 0.001)
    assert arm_collides(arm, q, grid)


def test_collision_matches_dense_oracle_on_random_cells(arm, profile_dict):
    """Impl agrees with dense segment sampling away from the knife edge."""
    rng = np.random.default_rng(13)
    q = arm.seed_configs[0]
    origins = oracles.chain_origins(profile_dict, q)
    checked = 0
    for _ in range(60):
        center = rng.uniform([-0.4, -0.4, 0.0], [0.4, 0.4, 0.5])
        grid = VoxelGrid(
            origin=center - 0.025, cell_size=np.full(3, 0.05), dims=(1, 1, 1),
            occupied=frozenset({(0, 0, 0)}),
        )
        d = min(
            oracles.segment_box_distance_dense(
                origins[i], origins[i + 1], grid.origin, grid.origin + grid.cell_size
            )
            for i in range(len(origins) - 1)
        )
        if abs(d - arm.link_radius) < 1e-4:
            continue  # knife edge: sampling resolution decides
        checked += 1
        assert arm_collides(arm, q, grid) == (d < arm.link_radius)
    assert checked >= 50


def test_ignore_cell_excludes_held_component(arm, profile_dict):
    q = arm.seed_configs[0]
    tip = oracles.chain_origins(profile_dict, q)[-1]
    grid = VoxelGrid(
        origin=tip - 0.025, cell_size=np.full(3, 0.05), dims=(1, 1, 1),
        occupied=frozenset({(0, 0, 0)}),
    )
    assert arm_collides(arm, q, grid)
    assert not arm_collides(arm, q, grid, ignore_cell=(0, 0, 0))


def test_collision_monotone_in_occupancy(arm):
    rng = np.random.default_rng(14)
    q = arm.seed_configs[0]
    cells = [
        tuple(int(v) for v in rng.integers(0, 6, 3)) for _ in range(30)
    ]
    grown = set()
    was_colliding = False
    for c in cells:
        grown.add(c)
        grid = VoxelGrid(
            origin=np.array([-0.15, -0.15, 0.0]),
            cell_size=np.full(3, 0.05),
            dims=(6, 6, 6),
            occupied=frozenset(grown),
        )
        hit = arm_collides(arm, q, grid)
        assert hit or not was_colliding
        was_colliding = hit or was_colliding


def test_any_collision_matches_per_config(arm):
    rng = np.random.default_rng(15)
    grid = make_grid([(i, j, 0) for i in range(4) for j in range(4)])
    configs = [arm.seed_configs[0] + rng.uniform(-0.3, 0.3, 6) for _ in range(8)]
    single = any(arm_collides(arm, c, grid) for c in configs)
    assert any_collision(arm, configs, grid) == single


def test_load_profile_fields(arm, profile_dict):
    assert arm.dh_rows.shape == (6, 4)
    assert arm.link_radius == profile_dict["link_radius"]
    assert len(arm.seed_configs) == len(profile_dict["seed_configs"])
    assert arm.name == profile_dict["name"]
