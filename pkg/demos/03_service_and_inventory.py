"""
The job service: build, simulate, disassemble, rebuild
======================================================

Drives the durable job store the same way the HTTP API does, including
a simulated process crash, to show how the component pool survives
restarts.  Writes its state under ./demo_service_data.
"""

import shutil

from promptfab.service import CrashInjected, JobStore

ROOT = "demo_service_data"
shutil.rmtree(ROOT, ignore_errors=True)

store = JobStore(ROOT)
print(f"pool: {store.inventory_summary()['free']} components free\n")

# Submit a prompt. The pipeline runs in the background; poll until it
# rests at awaiting_approval.
job = store.submit(prompt="a simple stool")
job = store.wait(job.id)
print(f"job {job.id}: {job.state}, {job.components} components, "
      f"~{job.duration_estimate:.0f} s estimated")
print("  stages:", " -> ".join(h["state"] for h in job.history))

# Approving allocates components from the pool, then replays every
# step of the plan as a simulated build.
store.approve(job.id)
job = store.wait(job.id, states=("done",))
print(f"after build: {store.inventory_summary()['free']} free "
      f"({job.components} allocated to the stool)\n")

# Now the interesting part: crash the process at the worst moment,
# right after the inventory ledger records a second build's allocation
# but before the job record knows about it.
second = store.wait(store.submit(prompt="a table with one leg").id)
store.crash_points = {"approve:after-ledger"}
try:
    store.approve(second.id)
except CrashInjected:
    print("process died mid-approval (simulated)")
store.close()

# A restart replays the ledger, notices the orphaned allocation, and
# rolls the job forward through its simulation. Nothing leaks.
store = JobStore(ROOT)
second = store.wait(second.id, states=("done",))
summary = store.inventory_summary()
print(f"after restart: job {second.id} is {second.state}, "
      f"{summary['free']} free + {sum(summary['allocations'].values())} "
      f"allocated = {summary['total']}\n")

# Disassembly runs the build in reverse and returns every component.
for job_id in list(summary["allocations"]):
    store.disassemble(job_id)
print(f"after disassembly: {store.inventory_summary()['free']} of "
      f"{store.inventory_summary()['total']} components free again")
store.close()
