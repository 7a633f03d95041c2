"""Evidence assignment and the combined static+dynamic pass."""

from helpers import GOLDEN, build_golden_kb, copy_workspace
from vulnvet.bom import build_bom, corpus_program
from vulnvet.callgraph import DYNAMIC as DYN_EDGE, app_reachability, build_call_graph
from vulnvet.combined import assess, combined_reachable, dynamic_edges
from vulnvet.constructs import METHOD, ConstructId
from vulnvet.detection import COMBINED, DYNAMIC, NONE, STATIC, detect
from vulnvet.interp import run_tests
from vulnvet.traces import TraceLog


def _pipeline(tmp_path):
    ws = copy_workspace(GOLDEN / "workspace", tmp_path / "ws")
    kb = build_golden_kb(tmp_path / "kb")
    bom = build_bom(ws / "app.json", ws)
    program = corpus_program(bom)
    graph = build_call_graph(program)
    log_a, _ = run_tests(bom, program, "test")
    log_b, _ = run_tests(bom, program, "itest")
    traces = log_a.merge(log_b)
    return bom, kb, graph, traces


def test_dynamic_edges_cross_reflection_gaps(tmp_path):
    _, _, graph, traces = _pipeline(tmp_path)
    edges = dynamic_edges(traces)
    pairs = {(e.caller.qname, e.callee.qname) for e in edges}
    assert ("app.Main.itestFramework()", "fw.Engine.dispatch(int)") in pairs
    assert ("lib1.Upload.process()", "lib2.Core.delta()") in pairs
    assert all(e.kind == DYN_EDGE for e in edges)


def test_combined_pass_with_empty_traces_reaches_nothing(tmp_path):
    _, _, graph, _ = _pipeline(tmp_path)
    result = combined_reachable(graph, TraceLog())
    assert result.reached == set()


def test_evidence_levels(tmp_path):
    bom, kb, graph, traces = _pipeline(tmp_path)
    findings = detect(bom, kb)
    r_a = app_reachability(bom, graph)
    r_t = combined_reachable(graph, traces)
    assess(findings, r_a, traces, r_t)
    by_id = {f.vuln_id: f for f in findings}

    f1 = by_id["VULN-J1"]
    assert f1.evidence == COMBINED
    eta = ConstructId(METHOD, "fw.Engine.renderError()")
    level, witness = f1.construct_evidence[eta]
    assert level == COMBINED
    assert [hop["qname"] for hop in witness["path"]] == [
        "fw.Engine.dispatch(int)", "fw.Engine.renderError()"]

    f2 = by_id["VULN-J2"]
    assert f2.evidence == COMBINED
    omega = ConstructId(METHOD, "lib3.Scan.omega()")
    assert f2.construct_evidence[omega][0] == COMBINED
    # check(int) is contained but never reached, so it carries no evidence
    check = ConstructId(METHOD, "lib3.Scan.check(int)")
    assert check not in f2.construct_evidence


def test_dynamic_beats_combined(tmp_path):
    # a construct both executed and reachable reports DYNAMIC with a trace witness
    bom, kb, graph, traces = _pipeline(tmp_path)
    findings = detect(bom, kb)
    r_a = app_reachability(bom, graph)
    r_t = combined_reachable(graph, traces)

    from vulnvet.kb import KnowledgeBase
    kb2 = KnowledgeBase(kb.root)
    # fake record targeting the executed construct delta()
    import vulnvet.diffing as dif
    from vulnvet.canonical import CTree, digest
    from vulnvet.kb import CODE_CHANGE, VulnerabilityRecord
    delta = ConstructId(METHOD, "lib2.Core.delta()")
    arc = bom.archive_named("lib2")
    observed = arc.constructs[delta]
    other = CTree("other")
    change = dif.ConstructChange(delta, dif.MOD, observed.body, other,
                                 observed.fingerprint, digest(other))
    kb2.save_record(VulnerabilityRecord("VULN-D", "", CODE_CHANGE, changes=[change]))
    findings = detect(bom, kb2)
    assess(findings, r_a, traces, r_t)
    fd = next(f for f in findings if f.vuln_id == "VULN-D")
    assert fd.evidence == DYNAMIC
    level, witness = fd.construct_evidence[delta]
    assert level == DYNAMIC and "trace" in witness


def test_static_evidence_without_traces(tmp_path):
    bom, kb, graph, _ = _pipeline(tmp_path)
    findings = detect(bom, kb)
    r_a = app_reachability(bom, graph)
    r_t = combined_reachable(graph, TraceLog())
    assess(findings, r_a, TraceLog(), r_t)
    # nothing in fw or lib3 is statically reachable: no evidence at all
    assert {f.evidence for f in findings} == {NONE}
