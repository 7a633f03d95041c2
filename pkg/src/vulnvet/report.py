"""Report assembly over the persisted workspace artifacts.

The report is built from the artifact files alone, so it reflects exactly
what the analysis steps ran so far produced. Evidence levels are recomputed
here from the trace log and the reachability closures, which lets a scan,
trace and reachability steps run in any order and still converge on the
same report.
"""

from __future__ import annotations

import html
import json

from . import __version__
from .callgraph import ReachResult
from .detection import COMBINED, DYNAMIC, NONE, STATIC
from .kb import KnowledgeBase
from .workspace import Workspace

_STRENGTH = {NONE: 0, STATIC: 1, COMBINED: 2, DYNAMIC: 3}


def reach_to_json(result: ReachResult) -> dict:
    return {
        "seeds": sorted(c.qname for c in result.seeds),
        "skippedSeeds": sorted(c.qname for c in result.skipped_seeds),
        "reached": [{"ctype": c.ctype, "qname": c.qname}
                    for c in sorted(result.reached)],
        "parents": {c.qname: {"caller": caller.qname, "site": site}
                    for c, (caller, site) in sorted(result.parent.items())},
    }


class _ReachView:
    """Read-only view of a persisted reachability artifact."""

    def __init__(self, data):
        data = data or {}
        self.seeds = set(data.get("seeds", ()))
        self.reached = {e["qname"] for e in data.get("reached", ())}
        self.parents = {q: (p["caller"], p["site"])
                        for q, p in data.get("parents", {}).items()}

    def path_to(self, qname):
        path = []
        node = qname
        while node not in self.seeds:
            if node not in self.parents:
                return None
            caller, site = self.parents[node]
            path.append({"qname": node, "site": site})
            node = caller
        path.append({"qname": node, "site": None})
        path.reverse()
        return path


def _load_trace_lines(ws: Workspace):
    path = ws.artifact("traces.jsonl")
    if not path.is_file():
        return []
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(json.loads(line))
    return out


def _attach_evidence(findings, trace_lines, r_static: _ReachView, r_combined: _ReachView):
    """Recompute per-construct and per-finding evidence on the JSON shapes."""
    first_event = {}
    for ev in trace_lines:
        first_event.setdefault(ev["callee"], ev)
    for f in findings:
        strongest = NONE
        for m in f.get("matched", ()):
            m.pop("evidence", None)
            if not m.get("contained"):
                continue
            qname = m["qname"]
            if qname in first_event:
                ev = first_event[qname]
                level = DYNAMIC
                witness = {"trace": {"test": ev["test"], "ts": ev["ts"],
                                     "caller": ev.get("caller"),
                                     "site": ev.get("site")}}
            elif qname in r_static.reached:
                level = STATIC
                witness = {"path": r_static.path_to(qname)}
            elif qname in r_combined.reached:
                level = COMBINED
                witness = {"path": r_combined.path_to(qname)}
            else:
                continue
            m["evidence"] = {"level": level, "witness": witness}
            if _STRENGTH[level] > _STRENGTH[strongest]:
                strongest = level
        f["evidence"] = strongest
    return findings


def _reached_counts(view: _ReachView, data) -> dict:
    counts = {}
    for e in (data or {}).get("reached", ()):
        counts[e["ctype"]] = counts.get(e["ctype"], 0) + 1
    return counts


def assemble_report(ws: Workspace) -> dict:
    bom = ws.read_json("bom.json") or {"archives": [], "resolutionWarnings": []}
    findings = ws.read_json("findings.json") or []
    static_data = ws.read_json("reach-static.json")
    combined_data = ws.read_json("reach-combined.json")
    r_static = _ReachView(static_data)
    r_combined = _ReachView(combined_data)
    trace_lines = _load_trace_lines(ws)
    findings = _attach_evidence(findings, trace_lines, r_static, r_combined)

    archives = []
    for a in bom.get("archives", ()):
        archives.append({"name": a["name"], "version": a["version"],
                         "kind": a["kind"], "depth": a["depth"],
                         "constructCounts": a["constructCounts"]})

    mitigation = {}
    if ws.artifact_dir.is_dir():
        for path in sorted(ws.artifact_dir.glob("mitigation-*.json")):
            lib = path.stem[len("mitigation-"):]
            mitigation[lib] = json.loads(path.read_text(encoding="utf-8"))

    kb = KnowledgeBase(ws.kb_path)
    kb_digest = kb.digest() if ws.kb_path.is_dir() else None

    return {
        "tool": {"name": "vulnvet", "version": __version__},
        "kbDigest": kb_digest,
        "bom": {"archives": archives,
                "resolutionWarnings": bom.get("resolutionWarnings", [])},
        "findings": findings,
        "reachability": {
            "static": {"present": static_data is not None,
                       "reachedByCtype": _reached_counts(r_static, static_data)},
            "combined": {"present": combined_data is not None,
                         "reachedByCtype": _reached_counts(r_combined, combined_data)},
            "tracedConstructs": len({e["callee"] for e in trace_lines}),
        },
        "mitigation": mitigation,
    }


def exit_code_for(findings) -> int:
    """0: nothing found; 1: findings without execution or reachability
    evidence; 2: at least one finding with evidence."""
    if not findings:
        return 0
    if any(f.get("evidence", NONE) != NONE for f in findings):
        return 2
    return 1


def _table(headers, rows) -> str:
    head = "".join("<th>%s</th>" % html.escape(str(h)) for h in headers)
    body = []
    for row in rows:
        cells = "".join("<td>%s</td>" % html.escape("" if c is None else str(c))
                        for c in row)
        body.append("<tr>%s</tr>" % cells)
    return "<table><thead><tr>%s</tr></thead><tbody>%s</tbody></table>" % (
        head, "".join(body))


def render_html(report: dict) -> str:
    parts = []
    parts.append("<h1>Dependency vulnerability report</h1>")
    parts.append("<p>vulnvet %s" % html.escape(report["tool"]["version"]))
    if report.get("kbDigest"):
        parts.append(" &middot; knowledge base %s" % html.escape(report["kbDigest"][:12]))
    parts.append("</p>")

    parts.append("<h2>Archives</h2>")
    parts.append(_table(
        ["name", "version", "kind", "depth", "constructs"],
        [(a["name"], a["version"], a["kind"], a["depth"],
          sum(a["constructCounts"].values()))
         for a in report["bom"]["archives"]]))
    for w in report["bom"]["resolutionWarnings"]:
        parts.append("<p class='warn'>%s</p>" % html.escape(w))

    parts.append("<h2>Findings</h2>")
    if report["findings"]:
        parts.append(_table(
            ["vulnerability", "archive", "version", "verdict", "evidence"],
            [(f["vulnId"], f["archive"]["name"], f["archive"]["version"],
              f["verdict"], f.get("evidence", NONE))
             for f in report["findings"]]))
        for f in report["findings"]:
            matched = f.get("matched")
            if not matched:
                continue
            parts.append("<h3>%s in %s:%s</h3>" % (
                html.escape(f["vulnId"]), html.escape(f["archive"]["name"]),
                html.escape(f["archive"]["version"])))
            rows = []
            for m in matched:
                cls = m.get("classification")
                ev = m.get("evidence")
                rows.append((m["ctype"], m["qname"], m["change"],
                             "yes" if m["contained"] else "no",
                             cls["verdict"] if cls else "",
                             ev["level"] if ev else ""))
            parts.append(_table(
                ["ctype", "construct", "change", "contained", "classification",
                 "evidence"], rows))
    else:
        parts.append("<p>No findings.</p>")

    parts.append("<h2>Reachability</h2>")
    reach = report["reachability"]
    parts.append(_table(
        ["analysis", "ran", "reached constructs"],
        [("static", reach["static"]["present"],
          sum(reach["static"]["reachedByCtype"].values())),
         ("combined", reach["combined"]["present"],
          sum(reach["combined"]["reachedByCtype"].values())),
         ("traced", bool(reach["tracedConstructs"]), reach["tracedConstructs"])]))

    if report["mitigation"]:
        parts.append("<h2>Update metrics</h2>")
        for lib in sorted(report["mitigation"]):
            data = report["mitigation"][lib]
            parts.append("<h3>%s</h3>" % html.escape(lib))
            rows = []
            for r in data.get("candidates", ()):
                cs = r.get("cs")
                rbs, obs = r["rbs"], r["obs"]
                rows.append((r["candidate"],
                             "%d/%d" % (cs["num"], cs["den"]) if cs else "n/a",
                             r["de"] if r.get("de") is not None else "n/a",
                             "%d/%d" % (rbs["num"], rbs["den"]),
                             "%d/%d" % (obs["num"], obs["den"])))
            parts.append(_table(["candidate", "CS", "DE", "RBS", "OBS"], rows))
            for note in data.get("notes", ()):
                parts.append("<p>%s</p>" % html.escape(note))

    parts.append("<h2>Raw data</h2><pre>%s</pre>" % html.escape(
        json.dumps(report, indent=2, sort_keys=True)))
    return ("<!DOCTYPE html><html><head><meta charset='utf-8'>"
            "<title>Dependency vulnerability report</title>"
            "<style>body{font-family:sans-serif;margin:2em}"
            "table{border-collapse:collapse;margin:0.5em 0}"
            "td,th{border:1px solid #999;padding:0.2em 0.6em;text-align:left}"
            ".warn{color:#a60}</style></head><body>%s</body></html>"
            % "".join(parts))
