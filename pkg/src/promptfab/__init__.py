"""promptfab: text prompts to feasibility-checked robotic assembly plans.

The pipeline runs prompt -> mesh -> voxel grid -> feasibility report ->
assembly toolpath, with a pick-and-place arm model, a reusable component
inventory, and an HTTP job service on top.
"""

from .config import Config, load_config
from .errors import (
    BadRequest,
    DegenerateBounds,
    DuplicateObject,
    EmptyMesh,
    EmptyResult,
    InsufficientComponents,
    JointLimit,
    MalformedFile,
    NoConvergence,
    NonClassifiable,
    NotGrounded,
    PromptFabError,
    ProviderUnavailable,
    UnintelligibleAudio,
    UnknownObject,
    Unplannable,
    WrongState,
)
from .feasibility import FeasibilityReport, SupportRule, analyze, connected_components
from .inventory import InventoryLedger
from .kinematics import (
    ArmModel,
    JointConfig,
    Pose,
    fk,
    ik,
    jacobian,
    load_arm_profile,
    reachable,
)
from .mesh import TriangleMesh, parse_mesh, point_in_mesh, serialize_mesh
from .pipeline import PipelineResult, run_pipeline
from .planner import (
    AssemblyPlan,
    AssemblyStep,
    MotionProfile,
    Waypoint,
    Workspace,
    estimate_duration,
    plan_assembly,
    plan_disassembly,
    plan_from_dict,
    plan_to_dict,
    replay_step,
    validate_plan,
)
from .providers import (
    GenerationRequest,
    RemoteConfig,
    ResemblanceVerdict,
    generate_mesh,
    transcribe,
    verify_resemblance,
)
from .render import render_grid
from .service import Job, JobStore, create_app
from .voxel import (
    ComponentSpec,
    ScalingTarget,
    VoxelGrid,
    grid_from_dict,
    grid_from_json,
    grid_to_dict,
    grid_to_json,
    scale_mesh_to_cells,
    voxelize,
)

__version__ = "0.1.0"
