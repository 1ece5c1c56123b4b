"""Command line entry points.

``run`` executes the whole pipeline for one prompt and writes the
artifacts to a directory, ``simulate`` replays a saved toolpath,
``serve`` starts the HTTP service, and ``catalog`` lists the objects
the mock generator knows about.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import load_config
from .errors import PromptFabError
from .kinematics import load_profile_dict
from .planner import Workspace, plan_from_dict, plan_to_dict, replay_step
from .voxel import grid_to_json


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--provider", choices=("mock", "remote"))
    p.add_argument("--arm-profile", dest="arm_profile", help="arm profile JSON")
    p.add_argument("--cell-size", dest="cell_size", type=float)


def _build_config(args: argparse.Namespace, **extra):
    overrides = {
        key: getattr(args, key, None)
        for key in ("provider", "arm_profile", "cell_size")
    }
    overrides.update(extra)
    return load_config(args.config, overrides=overrides)


def _cmd_run(args: argparse.Namespace) -> int:
    from .mesh import serialize_mesh
    from .pipeline import run_pipeline

    if bool(args.prompt) == bool(args.prompt_flag):
        print("error: give a prompt either positionally or via --prompt", file=sys.stderr)
        return 2
    args.prompt = args.prompt or args.prompt_flag
    config = _build_config(
        args,
        generation_seed=args.seed,
        height_cells=args.height_cells,
        max_cells=args.max_cells,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        result = run_pipeline(args.prompt, config)
    except PromptFabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    (out / "mesh.stl").write_bytes(serialize_mesh(result.mesh, "stl_binary"))
    (out / "grid.json").write_text(grid_to_json(result.grid))
    (out / "report.json").write_text(json.dumps(result.report.to_dict(), indent=1))
    (out / "plan.json").write_text(json.dumps(plan_to_dict(result.plan), indent=1))
    (out / "render.png").write_bytes(result.render_png)
    (out / "verdict.json").write_text(json.dumps(result.verdict.to_dict(), indent=1))

    plan = result.plan
    print(f"prompt:    {args.prompt}")
    print(f"cells:     {len(result.pruned.occupied)} ({len(result.report.pruned_cells)} pruned)")
    print(f"steps:     {len(plan.steps)}")
    print(f"duration:  {plan.estimated_duration:.1f} s estimated")
    print(f"verdict:   {'match' if result.verdict.matches else 'NO match'} "
          f"(score {result.verdict.score:.2f})")
    print(f"artifacts: {out}/")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _build_config(args)
    arm = config.arm()
    profile = load_profile_dict(config.arm_profile)
    workspace = Workspace.from_dict(profile["workspace"])

    with open(args.plan) as fh:
        plan = plan_from_dict(json.load(fh))

    placed: set = set()
    failures = 0
    for idx, step in enumerate(plan.steps, start=1):
        violation = replay_step(step, idx, placed, plan.grid, arm, workspace)
        placed.add(step.cell)
        mark = "ok " if violation is None else "VIOLATION"
        print(f"step {idx:3d} cell {step.cell}: {mark}"
              + (f" {violation}" if violation else ""))
        failures += violation is not None
    print(f"{len(plan.steps)} steps, {failures} violations, "
          f"{plan.estimated_duration:.1f} s estimated")
    return 1 if failures else 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import JobStore, create_app

    config = _build_config(args, data_dir=args.data_dir)
    store = JobStore(config.data_dir, config, sim_delay=args.sim_delay)
    app = create_app(store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_catalog(_args: argparse.Namespace) -> int:
    from .catalog import list_catalog

    for entry in list_catalog():
        print(f"{entry['name']:15s} {entry['cells']:3d} cells, "
              f"{entry['height_cells']:2d} high  keywords: {', '.join(entry['keywords'])}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="promptfab",
        description="Turn text prompts into feasibility-checked robotic assembly plans.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the full pipeline for one prompt")
    p.add_argument("prompt", nargs="?", default=None)
    p.add_argument("--prompt", dest="prompt_flag", default=None,
                   help="alternative to the positional prompt")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--height-cells", dest="height_cells", type=int, default=None)
    p.add_argument("--max-cells", dest="max_cells", type=int, default=None)
    p.add_argument("--out", default="promptfab_out")
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("simulate", help="replay and check a saved toolpath")
    p.add_argument("plan", help="plan.json produced by run or the service")
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("serve", help="start the HTTP job service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data-dir", dest="data_dir", default=None)
    p.add_argument("--sim-delay", dest="sim_delay", type=float, default=0.25)
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("catalog", help="list mock generator objects")
    p.set_defaults(fn=_cmd_catalog)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
