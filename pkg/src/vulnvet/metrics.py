"""Touch points and the four update metrics (CS, DE, RBS, OBS).

Callee stability and development effort are defined over the touch points of
a directly used dependency; the body stability metrics compare construct
inventories (identifier and fingerprint) and also apply to transitive
dependencies and frameworks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .constructs import CALLABLE_CTYPES, version_key, version_newer
from .errors import (EmptyConstructSet, NoCandidates, NoTouchPoints,
                     UnknownArchive, UnknownLibrary)
from .kb import KnowledgeBase, LibraryIndex


@dataclass(frozen=True)
class Ratio:
    num: int
    den: int

    @property
    def value(self) -> float:
        return self.num / self.den

    def __str__(self):
        return "%d/%d" % (self.num, self.den)


@dataclass
class TouchPoint:
    app_construct: object   # ConstructId in the application
    lib_callee: object      # ConstructId in the library
    sites: list = field(default_factory=list)
    found_static: bool = False
    found_dynamic: bool = False


@dataclass
class UpdateMetrics:
    candidate: str
    cs: Optional[Ratio]   # None when not applicable (no direct touch points)
    de: Optional[int]
    rbs: Ratio
    obs: Ratio


def touch_points(bom, graph, traces, lib: str) -> list:
    """Direct application-to-library call pairs with per-callee site lists,
    flagged by which analysis observed them. traces may be None."""
    arc = bom.archive_named(lib)
    if arc is None or arc is bom.application:
        raise UnknownArchive(lib)
    app_ids = {cid for cid in bom.application.constructs if cid.ctype in CALLABLE_CTYPES}
    lib_ids = {cid for cid in arc.constructs if cid.ctype in CALLABLE_CTYPES}
    points = {}

    def touch(caller, callee, site, static):
        tp = points.get((caller, callee))
        if tp is None:
            tp = points[(caller, callee)] = TouchPoint(caller, callee)
        if site is not None and site not in tp.sites:
            tp.sites.append(site)
        if static:
            tp.found_static = True
        else:
            tp.found_dynamic = True

    for e in sorted(graph.edges):
        if e.caller in app_ids and e.callee in lib_ids:
            touch(e.caller, e.callee, e.site, True)
    if traces is not None:
        for ev in traces.events:
            if ev.caller is not None and ev.caller in app_ids and ev.callee in lib_ids:
                touch(ev.caller, ev.callee, ev.site, False)
    out = [points[k] for k in sorted(points)]
    for tp in out:
        tp.sites.sort()
    return out


def _candidate_ids(index: LibraryIndex, candidate: str) -> dict:
    if candidate not in index.versions:
        raise UnknownLibrary("%s has no indexed version %s" % (index.name, candidate))
    return index.versions[candidate]


def callee_stability(tps: list, candidate: str, index: LibraryIndex) -> Ratio:
    """Fraction of distinct callees whose identifier exists in the candidate."""
    if not tps:
        raise NoTouchPoints("callee stability is undefined without touch points")
    ids = _candidate_ids(index, candidate)
    callees = sorted({tp.lib_callee for tp in tps})
    present = sum(1 for c in callees if c in ids)
    return Ratio(present, len(callees))


def development_effort(tps: list, candidate: str, index: LibraryIndex) -> int:
    """Number of application call sites whose callee is absent from the
    candidate; every site of a missing callee counts."""
    if not tps:
        raise NoTouchPoints("development effort is undefined without touch points")
    ids = _candidate_ids(index, candidate)
    missing_sites = set()
    for tp in tps:
        if tp.lib_callee not in ids:
            for site in tp.sites:
                missing_sites.add((tp.app_construct, tp.lib_callee, site))
    return len(missing_sites)


def body_stability(construct_set, candidate: str, index: LibraryIndex) -> Ratio:
    """Share of (id, fingerprint) pairs contained as-is in the candidate.

    Pass the reachable share of the library for RBS, or its full inventory
    for OBS; only METHOD/CONSTRUCTOR constructs count.
    """
    pairs = {(cid, fp) for cid, fp in construct_set if cid.ctype in CALLABLE_CTYPES}
    if not pairs:
        raise EmptyConstructSet("body stability needs a non-empty construct set")
    ids = _candidate_ids(index, candidate)
    kept = sum(1 for cid, fp in pairs if ids.get(cid) == fp)
    return Ratio(kept, len(pairs))


def recommend(lib: str, bom, kb: KnowledgeBase, graph, traces,
              reached_union) -> list:
    """Rank every non-vulnerable version newer than the one in use.

    reached_union: the overall reachable construct set (static, dynamic, and
    combined). For transitive dependencies and frameworks without direct
    touch points, CS/DE are not applicable and only RBS/OBS are emitted.
    Rows sorted by (cs desc, de asc, rbs desc, obs desc, version desc).
    """
    arc = bom.archive_named(lib)
    if arc is None or arc is bom.application:
        raise UnknownArchive(lib)
    index = kb.load_index(lib)
    candidates = [v for v in kb.non_vulnerable_versions(lib)
                  if version_newer(v, arc.version)]
    if not candidates:
        raise NoCandidates("no newer non-vulnerable version of %s" % lib)

    tps = touch_points(bom, graph, traces, lib) if bom.depth_of(lib) == 1 else []
    all_pairs = {(cid, c.fingerprint) for cid, c in arc.constructs.items()
                 if cid.ctype in CALLABLE_CTYPES}
    reach_pairs = {(cid, fp) for cid, fp in all_pairs if cid in reached_union}

    rows = []
    for v in candidates:
        cs = callee_stability(tps, v, index) if tps else None
        de = development_effort(tps, v, index) if tps else None
        rbs = (body_stability(reach_pairs, v, index) if reach_pairs
               else body_stability(all_pairs, v, index))
        obs = body_stability(all_pairs, v, index)
        rows.append(UpdateMetrics(v, cs, de, rbs, obs))
    rows.sort(key=lambda r: (-(r.cs.value if r.cs else 0.0),
                             r.de if r.de is not None else 0,
                             -r.rbs.value, -r.obs.value,
                             tuple(-p for p in version_key(r.candidate))))
    return rows


def metrics_csv(rows: list) -> str:
    lines = ["version,cs_num,cs_den,de,rbs_num,rbs_den,obs_num,obs_den"]
    for r in rows:
        lines.append("%s,%s,%s,%s,%d,%d,%d,%d" % (
            r.candidate,
            r.cs.num if r.cs else "", r.cs.den if r.cs else "",
            r.de if r.de is not None else "",
            r.rbs.num, r.rbs.den, r.obs.num, r.obs.den))
    return "\n".join(lines) + "\n"


def metrics_to_json(rows: list) -> list:
    out = []
    for r in rows:
        out.append({
            "candidate": r.candidate,
            "cs": {"num": r.cs.num, "den": r.cs.den} if r.cs else None,
            "de": r.de,
            "rbs": {"num": r.rbs.num, "den": r.rbs.den},
            "obs": {"num": r.obs.num, "den": r.obs.den},
        })
    return out


def _resolve_store_versions(workspace: Path, root_deps) -> dict:
    """Manifest-only breadth-first resolution: name -> version, nearest wins."""
    resolved = {}
    queue = [(n, v) for n, v in root_deps]
    while queue:
        name, version = queue.pop(0)
        if name in resolved:
            continue
        manifest = workspace / "libs" / name / version / "lib.json"
        if not manifest.is_file():
            continue
        resolved[name] = version
        data = json.loads(manifest.read_text(encoding="utf-8"))
        for d in data.get("dependencies", []):
            queue.append((d["name"], d["version"]))
    return resolved


def deep_update_advice(workspace: Path, bom, kb: KnowledgeBase, lib: str) -> list:
    """For a vulnerable transitive dependency, name newer versions of the
    direct dependency that pull in a non-vulnerable version of it."""
    workspace = Path(workspace)
    depth = bom.depth_of(lib)
    if depth is None or depth <= 1:
        return []
    try:
        safe = set(kb.non_vulnerable_versions(lib))
    except UnknownLibrary:
        return []
    notes = []
    for direct_name, _v in bom.application.declared_deps:
        store = workspace / "libs" / direct_name
        if not store.is_dir():
            continue
        current = bom.archive_named(direct_name)
        for vdir in sorted((p.name for p in store.iterdir() if p.is_dir()),
                           key=version_key):
            if current is not None and not version_newer(vdir, current.version):
                continue
            resolved = _resolve_store_versions(workspace, [(direct_name, vdir)])
            if lib in resolved and resolved[lib] in safe:
                notes.append("updating direct dependency %s to %s pulls in "
                             "non-vulnerable %s:%s"
                             % (direct_name, vdir, lib, resolved[lib]))
    return notes
