"""Execution trace model and the JSON-lines trace file format.

Each line: {"callee": qname, "ctype": "...", "caller": qname|null,
"site": "file:line"|null, "test": text, "ts": integer}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .constructs import CONSTRUCTOR, METHOD, ConstructId
from .errors import MalformedTraceLine


@dataclass(frozen=True)
class TraceEvent:
    callee: ConstructId
    caller: Optional[ConstructId]
    site: Optional[str]
    ts: int
    test: str


@dataclass
class TraceLog:
    events: list = field(default_factory=list)

    @property
    def executed(self) -> set:
        return {e.callee for e in self.events}

    @property
    def dynamic_edges(self) -> set:
        return {(e.caller, e.callee) for e in self.events if e.caller is not None}

    def first_event_for(self, cid: ConstructId) -> Optional[TraceEvent]:
        for e in self.events:
            if e.callee == cid:
                return e
        return None

    def merge(self, other: "TraceLog") -> "TraceLog":
        """Order-normalized union; events of re-run tests replace old ones."""
        rerun = {e.test for e in other.events}
        kept = [e for e in self.events if e.test not in rerun]
        return normalize(TraceLog(kept + list(other.events)))


def normalize(log: TraceLog) -> TraceLog:
    """Stable order by (test, ts) with timestamps renumbered from 1."""
    events = sorted(log.events, key=lambda e: (e.test, e.ts))
    out = []
    for i, e in enumerate(events, 1):
        out.append(TraceEvent(e.callee, e.caller, e.site, i, e.test))
    return TraceLog(out)


def guess_ctype(qname: str) -> str:
    """A member whose name equals its class simple name is a constructor."""
    head = qname.split("(", 1)[0]
    parts = head.rsplit(".", 2)
    if len(parts) >= 2 and parts[-1] == parts[-2]:
        return CONSTRUCTOR
    return METHOD


def to_jsonl(log: TraceLog) -> str:
    lines = []
    for e in log.events:
        lines.append(json.dumps({
            "callee": e.callee.qname,
            "ctype": e.callee.ctype,
            "caller": e.caller.qname if e.caller else None,
            "site": e.site,
            "test": e.test,
            "ts": e.ts,
        }, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


def ingest_traces(path: Path, known_ids=None) -> tuple:
    """Parse a trace file; returns (TraceLog, warnings). Unknown qualified
    names are warned about but kept."""
    warnings = []
    events = []
    known = {cid.qname: cid for cid in known_ids} if known_ids else {}
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedTraceLine(line_no, str(exc))
        if not isinstance(data, dict) or "callee" not in data or "ts" not in data:
            raise MalformedTraceLine(line_no, "missing callee or ts")
        if not isinstance(data["ts"], int):
            raise MalformedTraceLine(line_no, "ts must be an integer")
        callee_q = data["callee"]
        if known and callee_q not in known:
            warnings.append("line %d: unknown construct %s" % (line_no, callee_q))
        callee = known.get(callee_q) or ConstructId(
            data.get("ctype") or guess_ctype(callee_q), callee_q)
        caller = None
        if data.get("caller"):
            caller_q = data["caller"]
            if known and caller_q not in known:
                warnings.append("line %d: unknown construct %s" % (line_no, caller_q))
            caller = known.get(caller_q) or ConstructId(guess_ctype(caller_q), caller_q)
        events.append(TraceEvent(callee, caller, data.get("site"), data["ts"],
                                 data.get("test", "")))
    return normalize(TraceLog(events)), warnings
