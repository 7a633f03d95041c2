"""Construct-intersection detection and verdicts."""

from pathlib import Path

from helpers import GOLDEN, build_golden_kb, copy_workspace
from vulnvet.bom import APPLICATION, Archive, BOM, build_bom
from vulnvet.detection import (FIXED, MANUAL_REVIEW, VULNERABLE,
                               WHOLE_LIBRARY_AFFECTED, aggregate_verdict,
                               detect, finding_to_json)
from vulnvet.diffing import (CLOSER_TO_FIXED, CLOSER_TO_VULNERABLE,
                             EQUALS_FIXED, EQUALS_VULNERABLE, TIE,
                             Classification)


def _c(v):
    return Classification(v)


def test_aggregate_all_vulnerable_side():
    assert aggregate_verdict([_c(EQUALS_VULNERABLE), _c(CLOSER_TO_VULNERABLE)]) == VULNERABLE


def test_aggregate_all_fixed_side():
    assert aggregate_verdict([_c(EQUALS_FIXED), _c(CLOSER_TO_FIXED)]) == FIXED


def test_aggregate_mixed_or_tied_needs_review():
    assert aggregate_verdict([_c(EQUALS_FIXED), _c(EQUALS_VULNERABLE)]) == MANUAL_REVIEW
    assert aggregate_verdict([_c(TIE)]) == MANUAL_REVIEW
    assert aggregate_verdict([]) == MANUAL_REVIEW
    # containment-only entries carry no signal
    assert aggregate_verdict([None, None]) == MANUAL_REVIEW
    assert aggregate_verdict([None, _c(EQUALS_VULNERABLE)]) == VULNERABLE


def test_golden_detection_verdicts(tmp_path):
    ws = copy_workspace(GOLDEN / "workspace", tmp_path / "ws")
    kb = build_golden_kb(tmp_path / "kb")
    findings = detect(build_bom(ws / "app.json", ws), kb)
    assert {(f.vuln_id, f.archive_name, f.verdict) for f in findings} == {
        ("VULN-J1", "fw", VULNERABLE),
        ("VULN-J2", "lib3", VULNERABLE),
    }


def test_fixed_archive_is_reported_fixed(tmp_path):
    ws = copy_workspace(GOLDEN / "workspace", tmp_path / "ws")
    # ship the post-fix framework sources instead
    eng = ws / "libs/fw/1.0/src/engine.jx"
    eng.write_text((GOLDEN / "fixes/j1/after/engine.jx").read_text())
    kb = build_golden_kb(tmp_path / "kb")
    findings = detect(build_bom(ws / "app.json", ws), kb)
    f1 = next(f for f in findings if f.vuln_id == "VULN-J1")
    assert f1.verdict == FIXED


def test_whole_library_match_by_range(tmp_path):
    ws = copy_workspace(GOLDEN / "workspace", tmp_path / "ws")
    kb = build_golden_kb(tmp_path / "kb")
    kb.add_whole_library("VULN-W", [("lib2", "1.0", "1.9")])
    findings = detect(build_bom(ws / "app.json", ws), kb)
    fw = next(f for f in findings if f.vuln_id == "VULN-W")
    assert fw.archive_name == "lib2"
    assert fw.verdict == WHOLE_LIBRARY_AFFECTED


def test_finding_json_shape(tmp_path):
    ws = copy_workspace(GOLDEN / "workspace", tmp_path / "ws")
    kb = build_golden_kb(tmp_path / "kb")
    findings = detect(build_bom(ws / "app.json", ws), kb)
    data = finding_to_json(findings[0])
    assert set(data) == {"vulnId", "archive", "verdict", "evidence", "matched"}
    for entry in data["matched"]:
        assert {"ctype", "qname", "change", "contained",
                "classification"} <= set(entry)


def test_application_archive_is_scanned_too(tmp_path):
    # an application bundling the vulnerable class is flagged like a library
    ws = copy_workspace(GOLDEN / "workspace", tmp_path / "ws")
    vuln_src = (GOLDEN / "workspace/libs/lib3/1.0/src/scan.jx").read_text()
    (ws / "src/scan.jx").write_text(vuln_src)
    kb = build_golden_kb(tmp_path / "kb")
    findings = detect(build_bom(ws / "app.json", ws), kb)
    hits = {(f.vuln_id, f.archive_name) for f in findings}
    assert ("VULN-J2", "demo-app") in hits
    assert ("VULN-J2", "lib3") in hits
