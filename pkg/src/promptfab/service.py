"""Job service: a durable, concurrent wrapper around the pipeline.

Each job lives in its own directory with one file per artifact plus a
``job.json`` state record.  Every file write is atomic (temp file then
``os.replace``), and the inventory ledger is written before the state
that depends on it, so a crash at any point leaves the store in a state
the constructor can roll forward:

* ``simulating`` jobs re-run their simulation (a deterministic replay).
* ``awaiting_approval`` jobs that already hold an allocation were
  approved right before a crash; they move on to simulation.
* ``done`` jobs with no allocation and no released flag finished their
  release right before a crash; the flag is set.
* jobs still in the pipeline are re-run from the prompt.

``crash_points`` lets tests inject a simulated process death at the
interesting moments; the injected error derives from BaseException so
no failure handler can swallow it.
"""

import base64
import dataclasses
import json
import os
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .config import Config
from .errors import (
    BadRequest,
    PromptFabError,
    Unplannable,
    UnknownObject,
    WrongState,
)
from .inventory import InventoryLedger
from .kinematics import load_profile_dict
from .mesh import serialize_mesh
from .pipeline import stage_check, stage_generate, stage_plan, stage_verify, stage_voxelize
from .planner import (
    MotionProfile,
    Workspace,
    plan_disassembly,
    plan_from_dict,
    plan_to_dict,
    replay_step,
)
from .providers import transcribe
from .render import render_grid
from .voxel import grid_to_json

JOB_STATES = (
    "pending",
    "generated",
    "voxelized",
    "checked",
    "planned",
    "awaiting_approval",
    "simulating",
    "done",
    "failed",
)

# states a crash can interrupt mid-pipeline; recovery restarts these
_TRANSIENT = ("pending", "generated", "voxelized", "checked", "planned")

ARTIFACT_TYPES = {
    "mesh.stl": "model/stl",
    "grid.json": "application/json",
    "report.json": "application/json",
    "plan.json": "application/json",
    "render.png": "image/png",
    "verdict.json": "application/json",
    "simulation.json": "application/json",
    "disassembly.json": "application/json",
}


class CrashInjected(BaseException):
    """Simulated process death; deliberately not an Exception subclass."""


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


@dataclass
class Job:
    id: str
    prompt: str
    seed: int = 0
    state: str = "pending"
    error: str | None = None
    created: float = 0.0
    updated: float = 0.0
    components: int = 0
    released: bool = False
    sim_step: int = 0
    sim_total: int = 0
    duration_estimate: float | None = None
    verdict: dict | None = None
    options: dict = field(default_factory=dict)
    history: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Job":
        return cls(**d)


class JobStore:
    """Owns the data directory: jobs, artifacts, and the inventory ledger."""

    def __init__(
        self,
        root: str | Path,
        config: Config | None = None,
        max_workers: int = 4,
        sim_delay: float = 0.0,
    ):
        self.root = Path(root)
        self.config = config or Config()
        self.sim_delay = sim_delay
        self.crash_points: set[str] = set()
        self.jobs_dir = self.root / "jobs"
        self.jobs_dir.mkdir(parents=True, exist_ok=True)
        self.inventory = InventoryLedger.open(
            self.root / "inventory.jsonl", total=self.config.total_components
        )
        self._lock = threading.RLock()
        self._arm = self.config.arm()
        profile = load_profile_dict(self.config.arm_profile)
        self._motion = MotionProfile.from_dict(profile["motion"])
        self._workspace = Workspace.from_dict(profile["workspace"])
        self._executor = ThreadPoolExecutor(max_workers=max_workers)
        self._futures: list = []
        self._recover()

    # -- low-level job persistence ---------------------------------------

    def _job_dir(self, job_id: str) -> Path:
        return self.jobs_dir / job_id

    def _save(self, job: Job) -> None:
        job.updated = time.time()
        payload = json.dumps(job.to_dict(), indent=1).encode()
        _write_atomic(self._job_dir(job.id) / "job.json", payload)

    def get(self, job_id: str) -> Job:
        path = self._job_dir(job_id) / "job.json"
        if not path.exists():
            raise UnknownObject(f"no job {job_id!r}")
        with open(path) as fh:
            return Job.from_dict(json.load(fh))

    def _update(self, job_id: str, **fields) -> Job:
        with self._lock:
            job = self.get(job_id)
            for key, value in fields.items():
                setattr(job, key, value)
            if "state" in fields:
                job.history.append({"state": fields["state"], "ts": time.time()})
            self._save(job)
            return job

    def _write_artifact(self, job_id: str, name: str, data: bytes) -> None:
        if name not in ARTIFACT_TYPES:
            raise ValueError(f"unknown artifact name {name!r}")
        _write_atomic(self._job_dir(job_id) / name, data)

    def artifact_path(self, job_id: str, name: str) -> Path:
        if name not in ARTIFACT_TYPES:
            raise UnknownObject(f"no artifact named {name!r}")
        self.get(job_id)
        path = self._job_dir(job_id) / name
        if not path.exists():
            raise UnknownObject(f"job {job_id!r} has no {name!r} yet")
        return path

    def artifacts(self, job_id: str) -> list[str]:
        d = self._job_dir(job_id)
        return sorted(n for n in ARTIFACT_TYPES if (d / n).exists())

    def list_jobs(self) -> list[Job]:
        jobs = []
        for path in self.jobs_dir.iterdir():
            if (path / "job.json").exists():
                jobs.append(self.get(path.name))
        return sorted(jobs, key=lambda j: (j.created, j.id))

    def _crash(self, point: str) -> None:
        if point in self.crash_points:
            raise CrashInjected(point)

    # -- public operations -------------------------------------------------

    def submit(
        self,
        prompt: str | None = None,
        audio_b64: str | None = None,
        seed: int | None = None,
        height_cells: int | None = None,
        max_cells: int | None = None,
    ) -> Job:
        """Create a job and schedule its pipeline run."""
        if audio_b64 is not None:
            if prompt is not None:
                raise BadRequest("give either a prompt or audio, not both")
            try:
                audio = base64.b64decode(audio_b64, validate=True)
            except (ValueError, TypeError) as exc:
                raise BadRequest(f"audio_b64 is not valid base64: {exc}") from exc
            prompt = transcribe(
                audio, provider=self.config.provider, config=self.config.remote()
            )
        if prompt is None or not prompt.strip():
            raise BadRequest("prompt must be a nonempty string")
        if height_cells is not None and max_cells is not None:
            raise BadRequest("give at most one of height_cells and max_cells")

        now = time.time()
        job = Job(
            id=uuid.uuid4().hex[:12],
            prompt=prompt.strip(),
            seed=self.config.generation_seed if seed is None else int(seed),
            created=now,
            options={
                k: v
                for k, v in (("height_cells", height_cells), ("max_cells", max_cells))
                if v is not None
            },
            history=[{"state": "pending", "ts": now}],
        )
        self._job_dir(job.id).mkdir(parents=True)
        with self._lock:
            self._save(job)
        self._submit_task(self._run_pipeline_job, job.id)
        return self.get(job.id)

    def approve(self, job_id: str) -> Job:
        """Allocate components (ledger first) and start the build simulation."""
        with self._lock:
            job = self.get(job_id)
            if job.state != "awaiting_approval":
                raise WrongState(f"job {job_id} is {job.state}, not awaiting_approval")
            self.inventory.allocate(job_id, job.components)
            self._crash("approve:after-ledger")
            job = self._update(job_id, state="simulating")
        self._submit_task(self._simulate, job_id)
        return job

    def disassemble(self, job_id: str) -> Job:
        """Emit the removal order and return the components to the pool."""
        with self._lock:
            job = self.get(job_id)
            if job.state != "done" or job.released:
                state = "already released" if job.released else job.state
                raise WrongState(f"job {job_id} is {state}, not an assembled build")
            plan = self._load_plan(job_id)
            order = plan_disassembly(plan)
            self._write_artifact(
                job_id,
                "disassembly.json",
                json.dumps({"order": [list(c) for c in order]}, indent=1).encode(),
            )
            self.inventory.release(job_id)
            self._crash("release:after-ledger")
            return self._update(job_id, released=True)

    def inventory_summary(self) -> dict:
        with self._lock:
            return {
                "total": self.inventory.total,
                "free": self.inventory.free,
                "allocations": dict(sorted(self.inventory.allocations.items())),
            }

    def wait(self, job_id: str, timeout: float = 120.0, states=None) -> Job:
        """Poll until the job reaches one of ``states`` (default: any rest state)."""
        states = states or ("awaiting_approval", "done", "failed")
        deadline = time.monotonic() + timeout
        while True:
            job = self.get(job_id)
            if job.state in states:
                return job
            if time.monotonic() > deadline:
                raise TimeoutError(f"job {job_id} still {job.state} after {timeout}s")
            time.sleep(0.01)

    def close(self) -> None:
        self._executor.shutdown(wait=True)

    # -- background work ---------------------------------------------------

    def _submit_task(self, fn, *args) -> None:
        self._futures.append(self._executor.submit(fn, *args))

    def _job_config(self, job: Job) -> Config:
        return dataclasses.replace(
            self.config,
            generation_seed=job.seed,
            height_cells=job.options.get("height_cells", self.config.height_cells),
            max_cells=job.options.get("max_cells", self.config.max_cells),
        )

    def _load_plan(self, job_id: str):
        with open(self._job_dir(job_id) / "plan.json") as fh:
            return plan_from_dict(json.load(fh))

    def _fail(self, job_id: str, message: str) -> None:
        self._update(job_id, state="failed", error=message)

    def _run_pipeline_job(self, job_id: str) -> None:
        job = self.get(job_id)
        cfg = self._job_config(job)
        try:
            mesh = stage_generate(job.prompt, cfg, job.seed)
            self._write_artifact(job_id, "mesh.stl", serialize_mesh(mesh, "stl_binary"))
            self._update(job_id, state="generated")
            self._crash("pipeline:after-generated")

            _, grid = stage_voxelize(mesh, cfg)
            self._write_artifact(job_id, "grid.json", grid_to_json(grid).encode())
            self._update(job_id, state="voxelized")

            pruned, report = stage_check(grid, cfg)
            self._write_artifact(
                job_id, "report.json", json.dumps(report.to_dict(), indent=1).encode()
            )
            self._update(job_id, state="checked")
            if not report.feasible:
                self._fail(
                    job_id,
                    "structure is not buildable: "
                    f"{len(report.overhang_violations)} overhang violations, "
                    f"{len(report.pruned_cells)} unsupported cells pruned, grounded "
                    f"component {'present' if report.grounded_component is not None else 'missing'}",
                )
                return

            plan = stage_plan(pruned, cfg, self._arm)
            self._write_artifact(
                job_id,
                "plan.json",
                json.dumps(plan_to_dict(plan, self._motion), indent=1).encode(),
            )
            self._update(
                job_id,
                state="planned",
                components=len(plan.steps),
                duration_estimate=plan.estimated_duration,
            )

            png = render_grid(pruned)
            self._write_artifact(job_id, "render.png", png)
            verdict = stage_verify(png, job.prompt, cfg)
            self._write_artifact(
                job_id, "verdict.json", json.dumps(verdict.to_dict(), indent=1).encode()
            )
            self._update(job_id, state="awaiting_approval", verdict=verdict.to_dict())
        except Unplannable as exc:
            self._fail(job_id, f"cannot place cell {exc.cell}: {exc.reason} ({exc})")
        except PromptFabError as exc:
            self._fail(job_id, str(exc))
        except Exception as exc:  # pragma: no cover - defensive
            self._fail(job_id, f"internal error: {exc!r}")

    def _simulate(self, job_id: str) -> None:
        try:
            plan = self._load_plan(job_id)
            self._update(job_id, sim_step=0, sim_total=len(plan.steps))
            placed: set = set()
            outcomes = []
            first_violation = None
            for idx, step in enumerate(plan.steps, start=1):
                violation = replay_step(
                    step, idx, placed, plan.grid, self._arm, self._workspace
                )
                outcomes.append(
                    {
                        "step": idx,
                        "cell": list(step.cell),
                        "ok": violation is None,
                        "violation": violation,
                    }
                )
                if violation and first_violation is None:
                    first_violation = violation
                placed.add(step.cell)
                self._update(job_id, sim_step=idx)
                if idx == 1:
                    self._crash("sim:mid")
                if self.sim_delay:
                    time.sleep(self.sim_delay)
            self._write_artifact(
                job_id,
                "simulation.json",
                json.dumps(
                    {"ok": first_violation is None, "steps": outcomes}, indent=1
                ).encode(),
            )
            if first_violation is None:
                self._update(job_id, state="done")
            else:
                self._fail(job_id, f"simulation violation: {first_violation}")
        except PromptFabError as exc:
            self._fail(job_id, str(exc))
        except Exception as exc:  # pragma: no cover - defensive
            self._fail(job_id, f"internal error: {exc!r}")

    # -- crash recovery ------------------------------------------------------

    def _recover(self) -> None:
        allocated = set(self.inventory.allocations)
        for job in self.list_jobs():
            if job.state == "simulating":
                self._submit_task(self._simulate, job.id)
            elif job.state == "awaiting_approval" and job.id in allocated:
                self._update(job.id, state="simulating")
                self._submit_task(self._simulate, job.id)
            elif job.state == "done" and not job.released and job.id not in allocated:
                self._update(job.id, released=True)
            elif job.state in _TRANSIENT:
                self._submit_task(self._run_pipeline_job, job.id)


# ---------------------------------------------------------------------------
# HTTP API
# ---------------------------------------------------------------------------


def _job_payload(store: JobStore, job: Job) -> dict:
    payload = job.to_dict()
    payload["artifacts"] = {
        name.rsplit(".", 1)[0]: f"/jobs/{job.id}/artifacts/{name}"
        for name in store.artifacts(job.id)
    }
    return payload


def create_app(store: JobStore):
    """FastAPI application over a job store."""
    from fastapi import FastAPI, HTTPException, Response
    from pydantic import BaseModel

    class JobRequest(BaseModel):
        prompt: str | None = None
        audio_b64: str | None = None
        seed: int | None = None
        height_cells: int | None = None
        max_cells: int | None = None

    app = FastAPI(title="promptfab", version="1.0")
    # The console may be served from a different origin than the API.
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    app.state.store = store

    def _guard(fn, *args):
        from .errors import (
            InsufficientComponents,
            ProviderUnavailable,
            UnintelligibleAudio,
        )

        try:
            return fn(*args)
        except (BadRequest, UnintelligibleAudio) as exc:
            raise HTTPException(400, str(exc)) from exc
        except UnknownObject as exc:
            raise HTTPException(404, str(exc)) from exc
        except (WrongState, InsufficientComponents) as exc:
            raise HTTPException(409, str(exc)) from exc
        except ProviderUnavailable as exc:
            raise HTTPException(503, str(exc)) from exc

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "jobs": len(store.list_jobs())}

    @app.post("/jobs", status_code=202)
    def create_job(req: JobRequest):
        job = _guard(
            store.submit, req.prompt, req.audio_b64, req.seed, req.height_cells, req.max_cells
        )
        return _job_payload(store, job)

    @app.get("/jobs")
    def list_jobs():
        return {"jobs": [_job_payload(store, j) for j in store.list_jobs()]}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        return _job_payload(store, _guard(store.get, job_id))

    @app.get("/jobs/{job_id}/artifacts/{name}")
    def get_artifact(job_id: str, name: str):
        path = _guard(store.artifact_path, job_id, name)
        return Response(content=path.read_bytes(), media_type=ARTIFACT_TYPES[name])

    @app.post("/jobs/{job_id}/approve")
    def approve(job_id: str):
        return _job_payload(store, _guard(store.approve, job_id))

    @app.post("/jobs/{job_id}/disassemble")
    def disassemble(job_id: str):
        return _job_payload(store, _guard(store.disassemble, job_id))

    @app.get("/inventory")
    def inventory():
        return store.inventory_summary()

    return app
