"""Per-archive vulnerability detection via construct-set intersection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .bom import BOM
from .diffing import (CLOSER_TO_FIXED, CLOSER_TO_VULNERABLE, EQUALS_FIXED,
                      EQUALS_VULNERABLE, Classification, ConstructChange,
                      classify)
from .kb import CODE_CHANGE, KnowledgeBase, WHOLE_LIBRARY

VULNERABLE = "VULNERABLE"
FIXED = "FIXED"
MANUAL_REVIEW = "MANUAL_REVIEW"
WHOLE_LIBRARY_AFFECTED = "WHOLE_LIBRARY_AFFECTED"

# Evidence levels, weakest to strongest.
NONE = "NONE"
STATIC = "STATIC"
COMBINED = "COMBINED"
DYNAMIC = "DYNAMIC"
EVIDENCE_ORDER = (NONE, STATIC, COMBINED, DYNAMIC)


@dataclass
class MatchEntry:
    change: ConstructChange
    present: bool
    classification: Optional[Classification] = None


@dataclass
class Finding:
    vuln_id: str
    archive_name: str
    archive_version: str
    verdict: str
    matched: list = field(default_factory=list)  # MatchEntry per record change
    evidence: str = NONE
    # ConstructId -> (level, witness dict); filled by combined_analysis.assess
    construct_evidence: dict = field(default_factory=dict)


_VULN_SIDE = (EQUALS_VULNERABLE, CLOSER_TO_VULNERABLE)
_FIXED_SIDE = (EQUALS_FIXED, CLOSER_TO_FIXED)


def aggregate_verdict(classifications) -> str:
    """Verdict over the informative classifications of the matched constructs.

    All on the vulnerable side: VULNERABLE; all on the fixed side: FIXED;
    anything mixed, tied, or without signal needs manual review.
    """
    informative = [c for c in classifications if c is not None]
    if informative and all(c.verdict in _VULN_SIDE for c in informative):
        return VULNERABLE
    if informative and all(c.verdict in _FIXED_SIDE for c in informative):
        return FIXED
    return MANUAL_REVIEW


def detect(bom: BOM, kb: KnowledgeBase) -> list:
    """Match every archive (application included) against every KB record.

    CODE_CHANGE records match when the record's construct ids intersect the
    archive's; WHOLE_LIBRARY records match by name and version range. Findings
    are sorted by (vulnId, archive name, version). Detection depends only on
    construct ids and fingerprints, never on archive metadata.
    """
    findings = []
    records = kb.records()
    for arc, _depth in bom.archives():
        ids = arc.construct_ids()
        for record in records:
            if record.kind == WHOLE_LIBRARY:
                if record.covers_version(arc.name, arc.version):
                    findings.append(Finding(record.vuln_id, arc.name, arc.version,
                                            WHOLE_LIBRARY_AFFECTED))
                continue
            if record.kind != CODE_CHANGE:
                continue
            changed_ids = {ch.construct for ch in record.changes}
            if not (changed_ids & ids):
                continue
            matched = []
            for ch in sorted(record.changes, key=lambda c: c.construct):
                present = ch.construct in ids
                cls = classify(arc.constructs[ch.construct], ch) if present else None
                matched.append(MatchEntry(ch, present, cls))
            verdict = aggregate_verdict(m.classification for m in matched if m.present)
            findings.append(Finding(record.vuln_id, arc.name, arc.version,
                                    verdict, matched))
    findings.sort(key=lambda f: (f.vuln_id, f.archive_name, f.archive_version))
    return findings


def finding_to_json(f: Finding) -> dict:
    matched = []
    for m in f.matched:
        entry = {
            "ctype": m.change.construct.ctype,
            "qname": m.change.construct.qname,
            "change": m.change.op,
            "contained": m.present,
            "classification": None,
        }
        if m.classification is not None:
            entry["classification"] = {
                "verdict": m.classification.verdict,
                "distVuln": m.classification.dist_vuln,
                "distFixed": m.classification.dist_fixed,
            }
        ev = f.construct_evidence.get(m.change.construct)
        if ev is not None:
            entry["evidence"] = {"level": ev[0], "witness": ev[1]}
        matched.append(entry)
    return {
        "vulnId": f.vuln_id,
        "archive": {"name": f.archive_name, "version": f.archive_version},
        "verdict": f.verdict,
        "evidence": f.evidence,
        "matched": matched,
    }
