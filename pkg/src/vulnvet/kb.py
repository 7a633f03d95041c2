"""Vulnerability knowledge base: fix-derived change sets and library indexes.

Persisted as a directory of JSON documents, one per vulnerability
(``vulns/<id>.json``) and one per library (``libs/<name>.json``), with
construct bodies stored as canonical serializations so digests round-trip
bit-exact.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .canonical import deserialize, serialize
from .constructs import ConstructId, version_key
from .diffing import ADD, DEL, EQUALS_FIXED, EQUALS_VULNERABLE, ConstructChange
from .errors import DuplicateVuln, EmptyChangeSet, UnknownLibrary, VetError

CODE_CHANGE = "CODE_CHANGE"
WHOLE_LIBRARY = "WHOLE_LIBRARY"


@dataclass
class VulnerabilityRecord:
    vuln_id: str
    description: str
    kind: str
    changes: list = field(default_factory=list)   # ConstructChange, CODE_CHANGE only
    affected: list = field(default_factory=list)  # (library, lo, hi), WHOLE_LIBRARY only
    source_note: str = ""

    def covers_version(self, library: str, version: str) -> bool:
        key = version_key(version)
        for name, lo, hi in self.affected:
            if name == library and version_key(lo) <= key <= version_key(hi):
                return True
        return False


@dataclass
class LibraryIndex:
    name: str
    versions: dict  # version -> {ConstructId: fingerprint}


def _change_to_json(ch: ConstructChange) -> dict:
    return {
        "ctype": ch.construct.ctype,
        "qname": ch.construct.qname,
        "op": ch.op,
        "astVuln": serialize(ch.ast_vuln) if ch.ast_vuln is not None else None,
        "astFixed": serialize(ch.ast_fixed) if ch.ast_fixed is not None else None,
        "fpVuln": ch.fp_vuln,
        "fpFixed": ch.fp_fixed,
    }


def _change_from_json(data: dict) -> ConstructChange:
    return ConstructChange(
        construct=ConstructId(data["ctype"], data["qname"]),
        op=data["op"],
        ast_vuln=deserialize(data["astVuln"]) if data.get("astVuln") else None,
        ast_fixed=deserialize(data["astFixed"]) if data.get("astFixed") else None,
        fp_vuln=data.get("fpVuln"),
        fp_fixed=data.get("fpFixed"),
    )


def _dump(path: Path, data: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    tmp.replace(path)


class KnowledgeBase:
    def __init__(self, root: Path):
        self.root = Path(root)

    # --- paths ---

    def _vuln_path(self, vuln_id: str) -> Path:
        return self.root / "vulns" / (vuln_id + ".json")

    def _lib_path(self, name: str) -> Path:
        return self.root / "libs" / (name + ".json")

    # --- vulnerability records ---

    def import_fix(self, vuln_id: str, before: Path, after: Path,
                   exclusions=None, meta: str = "", description: str = "",
                   overwrite: bool = False) -> VulnerabilityRecord:
        """Derive and store a CODE_CHANGE record from a pre/post-fix source pair.

        exclusions filters out construct ids of unrelated changes mixed into
        the fix commit.
        """
        from .diffing import construct_changes_roots
        if not overwrite and self._vuln_path(vuln_id).exists():
            raise DuplicateVuln(vuln_id)
        excl = set(exclusions or ())
        changes = [ch for ch in construct_changes_roots(Path(before), Path(after))
                   if ch.construct not in excl]
        if not changes:
            raise EmptyChangeSet("fix for %s yields no construct changes" % vuln_id)
        record = VulnerabilityRecord(vuln_id, description, CODE_CHANGE,
                                     changes=changes, source_note=meta)
        self.save_record(record)
        return record

    def add_whole_library(self, vuln_id: str, affected, meta: str = "",
                          description: str = "", overwrite: bool = False) -> VulnerabilityRecord:
        """Store a WHOLE_LIBRARY record for fixes without code changes
        (e.g. default-configuration fixes): (library, lowVersion, highVersion)
        closed ranges."""
        if not overwrite and self._vuln_path(vuln_id).exists():
            raise DuplicateVuln(vuln_id)
        affected = [(n, lo, hi) for n, lo, hi in affected]
        if not affected:
            raise VetError("WHOLE_LIBRARY record needs at least one affected range")
        record = VulnerabilityRecord(vuln_id, description, WHOLE_LIBRARY,
                                     affected=affected, source_note=meta)
        self.save_record(record)
        return record

    def save_record(self, record: VulnerabilityRecord):
        data = {
            "vulnId": record.vuln_id,
            "description": record.description,
            "kind": record.kind,
            "sourceNote": record.source_note,
            "changes": [_change_to_json(ch) for ch in record.changes],
            "affected": [{"library": n, "low": lo, "high": hi}
                         for n, lo, hi in record.affected],
        }
        _dump(self._vuln_path(record.vuln_id), data)

    def load_record(self, vuln_id: str) -> VulnerabilityRecord:
        data = json.loads(self._vuln_path(vuln_id).read_text(encoding="utf-8"))
        return VulnerabilityRecord(
            vuln_id=data["vulnId"],
            description=data.get("description", ""),
            kind=data["kind"],
            changes=[_change_from_json(c) for c in data.get("changes", [])],
            affected=[(a["library"], a["low"], a["high"])
                      for a in data.get("affected", [])],
            source_note=data.get("sourceNote", ""),
        )

    def records(self) -> list:
        vulns_dir = self.root / "vulns"
        if not vulns_dir.is_dir():
            return []
        return [self.load_record(p.stem) for p in sorted(vulns_dir.glob("*.json"))]

    # --- library indexes ---

    def index_library(self, name: str, version_roots: dict) -> LibraryIndex:
        """Inventory every version root and persist the per-library index."""
        from .diffing import extract_root
        if not version_roots:
            raise VetError("no versions given for library %s" % name)
        versions = {}
        for version in sorted(version_roots, key=version_key):
            constructs = extract_root(Path(version_roots[version]))
            versions[version] = {cid: c.fingerprint for cid, c in constructs.items()}
        index = LibraryIndex(name, versions)
        self.save_index(index)
        return index

    def save_index(self, index: LibraryIndex):
        data = {
            "name": index.name,
            "versions": {
                v: [{"ctype": cid.ctype, "qname": cid.qname, "fingerprint": fp}
                    for cid, fp in sorted(cons.items())]
                for v, cons in index.versions.items()
            },
        }
        _dump(self._lib_path(index.name), data)

    def load_index(self, name: str) -> LibraryIndex:
        path = self._lib_path(name)
        if not path.is_file():
            raise UnknownLibrary(name)
        data = json.loads(path.read_text(encoding="utf-8"))
        versions = {}
        for v, entries in data["versions"].items():
            versions[v] = {ConstructId(e["ctype"], e["qname"]): e["fingerprint"]
                           for e in entries}
        return LibraryIndex(data["name"], versions)

    def library_names(self) -> list:
        libs_dir = self.root / "libs"
        if not libs_dir.is_dir():
            return []
        return sorted(p.stem for p in libs_dir.glob("*.json"))

    # --- version screening ---

    def non_vulnerable_versions(self, name: str) -> list:
        """Versions of an indexed library with no vulnerable detection verdict
        for any record, sorted ascending.

        Version sets carry fingerprints only, so classification here is
        digest-based; versions whose matched bodies equal neither side are not
        flagged as vulnerable.
        """
        index = self.load_index(name)
        records = self.records()
        out = []
        for version in sorted(index.versions, key=version_key):
            fps = index.versions[version]
            if any(self._version_vulnerable(r, name, version, fps) for r in records):
                continue
            out.append(version)
        return out

    def _version_vulnerable(self, record, name, version, fps) -> bool:
        if record.kind == WHOLE_LIBRARY:
            return record.covers_version(name, version)
        verdicts = []
        for ch in record.changes:
            if ch.construct not in fps:
                continue
            fp = fps[ch.construct]
            if ch.op == DEL:
                verdicts.append(EQUALS_VULNERABLE)
            elif ch.op == ADD:
                if fp is not None and fp == ch.fp_fixed:
                    verdicts.append(EQUALS_FIXED)
            elif ch.informative and fp is not None:
                if fp == ch.fp_vuln:
                    verdicts.append(EQUALS_VULNERABLE)
                elif fp == ch.fp_fixed:
                    verdicts.append(EQUALS_FIXED)
        return bool(verdicts) and all(v == EQUALS_VULNERABLE for v in verdicts)

    # --- provenance stamp ---

    def digest(self) -> str:
        """Content hash over the whole document set, for report stamping."""
        h = hashlib.sha256()
        for path in sorted(self.root.rglob("*.json")):
            h.update(str(path.relative_to(self.root)).encode())
            h.update(path.read_bytes())
        return h.hexdigest()
