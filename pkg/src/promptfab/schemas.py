"""JSON Schemas for every file this package reads or writes.

These are the documented contracts for the on-disk artifacts and the
arm profile.  Tests validate real artifacts against them; external
consumers (the console, a future robot driver) can rely on them.
"""

_VEC3 = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 3,
    "maxItems": 3,
}
_CELL = {
    "type": "array",
    "items": {"type": "integer"},
    "minItems": 3,
    "maxItems": 3,
}
_SIX = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 6,
    "maxItems": 6,
}
_POSE = {
    "type": "object",
    "required": ["position", "orientation"],
    "properties": {
        "position": _VEC3,
        "orientation": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 4,
            "maxItems": 4,
        },
    },
    "additionalProperties": False,
}

GRID_SCHEMA = {
    "type": "object",
    "required": ["origin", "cell_size", "dims", "occupied"],
    "properties": {
        "origin": _VEC3,
        "cell_size": _VEC3,
        "dims": _CELL,
        "occupied": {"type": "array", "items": _CELL},
    },
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "component_sizes",
        "grounded_component",
        "pruned_cells",
        "overhang_violations",
        "feasible",
    ],
    "properties": {
        "component_sizes": {"type": "array", "items": {"type": "integer"}},
        "grounded_component": {"type": ["integer", "null"]},
        "pruned_cells": {"type": "array", "items": _CELL},
        "overhang_violations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["cell", "cantilever"],
                "properties": {
                    "cell": _CELL,
                    "cantilever": {"type": ["integer", "null"]},
                },
                "additionalProperties": False,
            },
        },
        "feasible": {"type": "boolean"},
    },
    "additionalProperties": False,
}

_WAYPOINT = {
    "type": "object",
    "required": ["name", "pose", "q", "gripper"],
    "properties": {
        "name": {"type": "string"},
        "pose": _POSE,
        "q": _SIX,
        "gripper": {"enum": ["open", "close", None]},
    },
    "additionalProperties": False,
}

PLAN_SCHEMA = {
    "type": "object",
    "required": ["version", "grid", "estimated_duration", "steps"],
    "properties": {
        "version": {"const": 1},
        "grid": GRID_SCHEMA,
        "estimated_duration": {"type": "number", "minimum": 0},
        "steps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "cell",
                    "component_id",
                    "pick",
                    "place",
                    "approach_dir",
                    "witness_q",
                    "waypoints",
                    "leg_times",
                ],
                "properties": {
                    "cell": _CELL,
                    "component_id": {"type": "string"},
                    "pick": _POSE,
                    "place": _POSE,
                    "approach_dir": {"enum": ["+z", "+x", "-x", "+y", "-y"]},
                    "witness_q": _SIX,
                    "waypoints": {"type": "array", "items": _WAYPOINT, "minItems": 2},
                    "leg_times": {
                        "type": "array",
                        "items": {"type": "number", "minimum": 0},
                    },
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

VERDICT_SCHEMA = {
    "type": "object",
    "required": ["matches", "score", "rationale"],
    "properties": {
        "matches": {"type": "boolean"},
        "score": {"type": "number", "minimum": 0, "maximum": 1},
        "rationale": {"type": "string"},
    },
    "additionalProperties": False,
}

SIMULATION_SCHEMA = {
    "type": "object",
    "required": ["ok", "steps"],
    "properties": {
        "ok": {"type": "boolean"},
        "steps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["step", "cell", "ok", "violation"],
                "properties": {
                    "step": {"type": "integer", "minimum": 1},
                    "cell": _CELL,
                    "ok": {"type": "boolean"},
                    "violation": {"type": ["string", "null"]},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

DISASSEMBLY_SCHEMA = {
    "type": "object",
    "required": ["order"],
    "properties": {"order": {"type": "array", "items": _CELL}},
    "additionalProperties": False,
}

JOB_SCHEMA = {
    "type": "object",
    "required": ["id", "prompt", "seed", "state", "error", "created", "updated"],
    "properties": {
        "id": {"type": "string"},
        "prompt": {"type": "string"},
        "seed": {"type": "integer"},
        "state": {
            "enum": [
                "pending",
                "generated",
                "voxelized",
                "checked",
                "planned",
                "awaiting_approval",
                "simulating",
                "done",
                "failed",
            ]
        },
        "error": {"type": ["string", "null"]},
        "created": {"type": "number"},
        "updated": {"type": "number"},
        "components": {"type": "integer", "minimum": 0},
        "released": {"type": "boolean"},
        "sim_step": {"type": "integer", "minimum": 0},
        "sim_total": {"type": "integer", "minimum": 0},
        "duration_estimate": {"type": ["number", "null"]},
        "verdict": {"anyOf": [VERDICT_SCHEMA, {"type": "null"}]},
        "options": {"type": "object"},
        "history": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["state", "ts"],
                "properties": {"state": {"type": "string"}, "ts": {"type": "number"}},
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

ARM_PROFILE_SCHEMA = {
    "type": "object",
    "required": ["dh", "joint_limits", "base_pose", "tool_offset", "link_radius"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "dh": {
            "type": "array",
            "minItems": 6,
            "maxItems": 6,
            "items": {
                "type": "object",
                "required": ["a", "alpha", "d", "theta_offset"],
                "properties": {
                    "a": {"type": "number"},
                    "alpha": {"type": "number"},
                    "d": {"type": "number"},
                    "theta_offset": {"type": "number"},
                },
                "additionalProperties": False,
            },
        },
        "joint_limits": {
            "type": "array",
            "minItems": 6,
            "maxItems": 6,
            "items": {
                "type": "array",
                "items": {"type": "number"},
                "minItems": 2,
                "maxItems": 2,
            },
        },
        "base_pose": _POSE,
        "tool_offset": _POSE,
        "link_radius": {"type": "number", "exclusiveMinimum": 0},
        "seed_configs": {"type": "array", "items": _SIX, "minItems": 1},
        "motion": {
            "type": "object",
            "required": ["joint_vel_max", "joint_acc_max"],
            "properties": {
                "joint_vel_max": _SIX,
                "joint_acc_max": _SIX,
                "pick_dwell": {"type": "number", "minimum": 0},
                "place_dwell": {"type": "number", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "workspace": {
            "type": "object",
            "required": ["feeder"],
            "properties": {
                "feeder": _VEC3,
                "safe_clearance": {"type": "number", "minimum": 0},
                "corridor_cells": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}
