"""Fix-diff analysis: construct change sets and vulnerable/fixed classification."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .constructs import (CALLABLE_CTYPES, Construct, ConstructId,
                         extract_constructs)
from .errors import EmptyRange, IdMismatch
from .jx import resolve
from .ted import tree_edit_distance

ADD = "ADD"
DEL = "DEL"
MOD = "MOD"

EQUALS_VULNERABLE = "EQUALS_VULNERABLE"
EQUALS_FIXED = "EQUALS_FIXED"
CLOSER_TO_VULNERABLE = "CLOSER_TO_VULNERABLE"
CLOSER_TO_FIXED = "CLOSER_TO_FIXED"
TIE = "TIE"


@dataclass
class ConstructChange:
    construct: ConstructId
    op: str
    ast_vuln: Optional[object] = None   # CTree; absent for ADD
    ast_fixed: Optional[object] = None  # CTree; absent for DEL
    fp_vuln: Optional[str] = None
    fp_fixed: Optional[str] = None

    @property
    def informative(self) -> bool:
        """Whether this change can distinguish vulnerable from fixed code.

        Outer-construct entries produced by the nested-change rule can carry
        identical signature-level trees on both sides; those (and body-less
        constructs such as packages) only witness containment.
        """
        if self.op in (ADD, DEL):
            return True
        return self.fp_vuln is not None and self.fp_vuln != self.fp_fixed


@dataclass
class Classification:
    verdict: str
    dist_vuln: Optional[int] = None
    dist_fixed: Optional[int] = None


def _enclosing_type(cid: ConstructId) -> Optional[str]:
    if cid.ctype not in CALLABLE_CTYPES:
        return None
    head = cid.qname.split("(", 1)[0]
    return head.rsplit(".", 1)[0]


def construct_changes(before: dict, after: dict) -> list:
    """Diff two construct inventories (ConstructId -> Construct maps).

    Constructs present on one side only become ADD/DEL entries; differing
    fingerprints become MOD. A change in a member also yields a MOD entry for
    its enclosing class or interface, even when the signature-level tree is
    unchanged. Result is sorted by construct id.
    """
    changes = {}
    for cid in before.keys() | after.keys():
        b = before.get(cid)
        a = after.get(cid)
        if b is not None and a is None:
            changes[cid] = ConstructChange(cid, DEL, ast_vuln=b.body, fp_vuln=b.fingerprint)
        elif b is None and a is not None:
            changes[cid] = ConstructChange(cid, ADD, ast_fixed=a.body, fp_fixed=a.fingerprint)
        elif b.fingerprint != a.fingerprint:
            changes[cid] = ConstructChange(cid, MOD, b.body, a.body,
                                           b.fingerprint, a.fingerprint)
    for cid in list(changes):
        owner = _enclosing_type(cid)
        if owner is None:
            continue
        for octype in ("CLASS", "INTERFACE"):
            oid = ConstructId(octype, owner)
            if oid in changes or oid not in before or oid not in after:
                continue
            ob, oa = before[oid], after[oid]
            changes[oid] = ConstructChange(oid, MOD, ob.body, oa.body,
                                           ob.fingerprint, oa.fingerprint)
    return [changes[cid] for cid in sorted(changes)]


def extract_root(root: Path) -> dict:
    """Parse and inventory one source root in isolation."""
    from .bom import parse_source_root
    units = parse_source_root(Path(root))
    return extract_constructs(resolve(units))


def construct_changes_roots(before_root: Path, after_root: Path) -> list:
    return construct_changes(extract_root(before_root), extract_root(after_root))


def consolidate_commits(revision_roots) -> list:
    """Change set of a multi-commit fix: diff of the first and last revision."""
    roots = list(revision_roots)
    if len(roots) < 2:
        raise EmptyRange("need at least 2 revisions, got %d" % len(roots))
    return construct_changes_roots(roots[0], roots[-1])


def classify(observed: Construct, change: ConstructChange) -> Optional[Classification]:
    """Classify an observed construct body against a change entry.

    Returns None for containment-only entries (no usable signal): body-less
    constructs and MOD entries whose two sides fingerprint identically.
    Digest equality wins before any distance comparison.
    """
    if observed.id != change.construct:
        raise IdMismatch("observed %s vs change %s" % (observed.id, change.construct))
    if change.op == DEL:
        return Classification(EQUALS_VULNERABLE)
    if change.op == ADD:
        if observed.fingerprint is not None and observed.fingerprint == change.fp_fixed:
            return Classification(EQUALS_FIXED)
        return Classification(TIE) if observed.fingerprint is not None else None
    if not change.informative or observed.body is None:
        return None
    if observed.fingerprint == change.fp_vuln:
        return Classification(EQUALS_VULNERABLE)
    if observed.fingerprint == change.fp_fixed:
        return Classification(EQUALS_FIXED)
    dv = tree_edit_distance(observed.body, change.ast_vuln)
    df = tree_edit_distance(observed.body, change.ast_fixed)
    if dv < df:
        return Classification(CLOSER_TO_VULNERABLE, dv, df)
    if df < dv:
        return Classification(CLOSER_TO_FIXED, dv, df)
    return Classification(TIE, dv, df)
