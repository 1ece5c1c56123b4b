"""Event-sourced tracking of a finite pool of reusable components.

Components are fungible: the ledger counts them, it does not name them.
Every mutation appends one JSON record to the event log before the
in-memory state changes, so a crashed process reconstructs the exact
ledger by replaying the file.

Event file schema, one JSON object per line:
    {"ts": <iso8601>, "event": "init",     "object_id": null, "count": <total>}
    {"ts": <iso8601>, "event": "allocate", "object_id": <id>, "count": <n>}
    {"ts": <iso8601>, "event": "release",  "object_id": <id>, "count": <n>}
"""

from __future__ import annotations

import json
import os
from datetime import datetime, timezone
from pathlib import Path

from .errors import DuplicateObject, InsufficientComponents, UnknownObject

DEFAULT_POOL = 40


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class InventoryLedger:
    """Counted component pool with an append-only event history.

    With ``path`` set, every event is fsynced to disk before it takes
    effect in memory; without it the ledger is purely in-memory.
    """

    def __init__(self, total: int = DEFAULT_POOL, path: str | Path | None = None):
        if total < 0:
            raise ValueError("total must be non-negative")
        self.total = total
        self.free = total
        self.allocations: dict[str, int] = {}
        self.event_log: list[tuple[str, str, str | None, int]] = []
        self.path = Path(path) if path is not None else None
        self._record("init", None, total)

    # -- event plumbing ------------------------------------------------

    def _record(self, event: str, object_id: str | None, count: int) -> None:
        entry = (_now(), event, object_id, count)
        if self.path is not None:
            line = json.dumps(
                {"ts": entry[0], "event": event, "object_id": object_id, "count": count}
            )
            with open(self.path, "a") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        self.event_log.append(entry)

    def _check(self) -> None:
        allocated = sum(self.allocations.values())
        if self.free + allocated != self.total or self.free < 0:
            raise AssertionError(
                f"conservation broken: free={self.free} allocated={allocated} total={self.total}"
            )

    # -- operations ----------------------------------------------------

    def allocate(self, object_id: str, count: int) -> "InventoryLedger":
        if count < 0:
            raise ValueError("count must be non-negative")
        if object_id in self.allocations:
            raise DuplicateObject(f"{object_id!r} already holds components")
        if count > self.free:
            raise InsufficientComponents(f"{count} components requested, only {self.free} free")
        self._record("allocate", object_id, count)
        self.free -= count
        self.allocations[object_id] = count
        self._check()
        return self

    def release(self, object_id: str) -> "InventoryLedger":
        if object_id not in self.allocations:
            raise UnknownObject(f"{object_id!r} holds no components")
        count = self.allocations[object_id]
        self._record("release", object_id, count)
        self.free += count
        del self.allocations[object_id]
        self._check()
        return self

    def allocated_to(self, object_id: str) -> int:
        return self.allocations.get(object_id, 0)

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "free": self.free,
            "allocations": dict(sorted(self.allocations.items())),
            "events": [
                {"ts": ts, "event": ev, "object_id": oid, "count": n}
                for ts, ev, oid, n in self.event_log
            ],
        }

    # -- persistence ---------------------------------------------------

    @classmethod
    def replay(cls, path: str | Path) -> "InventoryLedger":
        """Rebuild a ledger from its event file; the file is not rewritten."""
        path = Path(path)
        events = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    events.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise ValueError(f"{path}:{lineno}: bad ledger record") from exc
        if not events or events[0]["event"] != "init":
            raise ValueError(f"{path}: ledger must start with an init record")
        ledger = cls.__new__(cls)
        ledger.total = events[0]["count"]
        ledger.free = ledger.total
        ledger.allocations = {}
        ledger.event_log = []
        ledger.path = None  # replay silently, then reattach
        ledger.event_log.append((events[0]["ts"], "init", None, ledger.total))
        for ev in events[1:]:
            kind, oid, count = ev["event"], ev["object_id"], ev["count"]
            ledger.event_log.append((ev["ts"], kind, oid, count))
            if kind == "allocate":
                ledger.free -= count
                ledger.allocations[oid] = count
            elif kind == "release":
                ledger.free += count
                del ledger.allocations[oid]
            else:
                raise ValueError(f"{path}: unknown event {kind!r}")
            ledger._check()
        ledger.path = path
        return ledger

    @classmethod
    def open(cls, path: str | Path, total: int = DEFAULT_POOL) -> "InventoryLedger":
        """Replay an existing event file or start a fresh ledger at it."""
        path = Path(path)
        if path.exists() and path.stat().st_size > 0:
            return cls.replay(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        return cls(total=total, path=path)
