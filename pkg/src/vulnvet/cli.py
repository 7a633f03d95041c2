"""Command line entry point (``vet``).

Exit codes: 0 nothing found, 1 findings without execution or reachability
evidence, 2 findings with evidence, 3 analysis error, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .bom import build_bom, bom_to_json, corpus_program
from .callgraph import app_reachability, build_call_graph, graph_to_json
from .combined import combined_reachable
from .constructs import (CLASS, CONSTRUCTOR, INTERFACE, METHOD, PACKAGE,
                         ConstructId)
from .detection import detect, finding_to_json
from .errors import VetError
from .interp import run_tests
from .jx.errors import JxError
from .kb import KnowledgeBase
from .metrics import deep_update_advice, metrics_csv, metrics_to_json, recommend
from .report import assemble_report, exit_code_for, reach_to_json, render_html
from .traces import TraceLog, ingest_traces, to_jsonl
from .workspace import Workspace

EXIT_ERROR = 3
EXIT_USAGE = 64

_CTYPES = (PACKAGE, CLASS, INTERFACE, CONSTRUCTOR, METHOD)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print("%s: error: %s" % (self.prog, message), file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    p = _Parser(prog="vet", description="usage-based vulnerability analysis "
                "for application dependencies")
    p.add_argument("--workspace", help="workspace root (default: "
                   "$VET_WORKSPACE or the current directory)")
    p.add_argument("--kb", help="knowledge base directory (default: "
                   "<workspace>/kb)")
    p.add_argument("--version", action="version", version="vet " + __version__)
    sub = p.add_subparsers(dest="command", required=True)

    kb = sub.add_parser("kb", help="manage the vulnerability knowledge base")
    kbsub = kb.add_subparsers(dest="kb_command", required=True)

    imp = kbsub.add_parser("import-fix", help="derive a change set from a "
                           "pre-fix and post-fix source tree")
    imp.add_argument("--id", required=True, dest="vuln_id")
    imp.add_argument("--before", required=True)
    imp.add_argument("--after", required=True)
    imp.add_argument("--exclude", action="append", default=[],
                     metavar="CTYPE:QNAME",
                     help="drop this construct from the change set")
    imp.add_argument("--description", default="")
    imp.add_argument("--meta", default="", help="free-form provenance note")
    imp.add_argument("--overwrite", action="store_true")

    rng = kbsub.add_parser("add-range", help="record a vulnerability without "
                           "a code change, by affected version range")
    rng.add_argument("--id", required=True, dest="vuln_id")
    rng.add_argument("--affected", action="append", required=True,
                     metavar="LIB:LOW:HIGH")
    rng.add_argument("--description", default="")
    rng.add_argument("--meta", default="")
    rng.add_argument("--overwrite", action="store_true")

    idx = kbsub.add_parser("index-lib", help="inventory library versions for "
                           "update metrics and version screening")
    idx.add_argument("--name", required=True)
    idx.add_argument("--root", action="append", required=True,
                     metavar="VERSION=PATH")

    kbsub.add_parser("list", help="list stored records and library indexes")

    sub.add_parser("scan", help="build the bill of materials and match it "
                   "against the knowledge base")

    tr = sub.add_parser("trace", help="dynamic analysis")
    trsub = tr.add_subparsers(dest="trace_command", required=True)
    trun = trsub.add_parser("run", help="run matching tests under the tracing "
                            "interpreter and merge the trace log")
    trun.add_argument("--pattern", default="test",
                      help="test name prefix (default: test)")

    rc = sub.add_parser("reach", help="reachability analysis")
    rcsub = rc.add_subparsers(dest="reach_command", required=True)
    rcsub.add_parser("static", help="call graph closure from application code")
    rcsub.add_parser("combined", help="closure from traced constructs over "
                     "the trace-augmented call graph")

    mit = sub.add_parser("mitigate", help="rank update candidates for a "
                         "dependency")
    mit.add_argument("--lib", required=True)

    rep = sub.add_parser("report", help="assemble the report from the "
                         "workspace artifacts")
    rep.add_argument("--format", choices=("json", "html"), default="json")
    return p


def _parse_exclusions(items):
    out = set()
    for item in items:
        ctype, sep, qname = item.partition(":")
        if not sep or ctype not in _CTYPES:
            raise VetError("bad --exclude %r, expected CTYPE:QNAME" % item)
        out.add(ConstructId(ctype, qname))
    return out


def _known_ids(bom):
    ids = set()
    for arc, _depth in bom.archives():
        ids |= arc.construct_ids()
    return ids


def _load_traces(ws: Workspace, bom) -> TraceLog:
    path = ws.artifact("traces.jsonl")
    if not path.is_file():
        return TraceLog()
    log, warnings = ingest_traces(path, _known_ids(bom))
    for w in warnings:
        print("trace: %s" % w, file=sys.stderr)
    return log


def _cmd_kb(args, ws: Workspace) -> int:
    kb = KnowledgeBase(ws.kb_path)
    if args.kb_command == "import-fix":
        record = kb.import_fix(args.vuln_id, Path(args.before), Path(args.after),
                               exclusions=_parse_exclusions(args.exclude),
                               meta=args.meta, description=args.description,
                               overwrite=args.overwrite)
        print("imported %s: %d construct changes" % (record.vuln_id,
                                                     len(record.changes)))
    elif args.kb_command == "add-range":
        affected = []
        for item in args.affected:
            parts = item.split(":")
            if len(parts) != 3:
                raise VetError("bad --affected %r, expected LIB:LOW:HIGH" % item)
            affected.append(tuple(parts))
        record = kb.add_whole_library(args.vuln_id, affected, meta=args.meta,
                                     description=args.description,
                                     overwrite=args.overwrite)
        print("recorded %s: %d affected ranges" % (record.vuln_id,
                                                   len(record.affected)))
    elif args.kb_command == "index-lib":
        roots = {}
        for item in args.root:
            version, sep, path = item.partition("=")
            if not sep:
                raise VetError("bad --root %r, expected VERSION=PATH" % item)
            roots[version] = Path(path)
        index = kb.index_library(args.name, roots)
        print("indexed %s: %d versions" % (index.name, len(index.versions)))
    elif args.kb_command == "list":
        for record in kb.records():
            detail = ("%d changes" % len(record.changes)
                      if record.changes else "%d ranges" % len(record.affected))
            print("vuln %s (%s, %s)" % (record.vuln_id, record.kind, detail))
        for name in kb.library_names():
            index = kb.load_index(name)
            print("lib %s (%d versions)" % (name, len(index.versions)))
    return 0


def _cmd_scan(args, ws: Workspace) -> int:
    bom = build_bom(ws.manifest, ws.root)
    for w in bom.warnings:
        print("bom: %s" % w, file=sys.stderr)
    kb = KnowledgeBase(ws.kb_path)
    findings = [finding_to_json(f) for f in detect(bom, kb)]
    ws.write_json("bom.json", bom_to_json(bom))
    ws.write_json("findings.json", findings)
    n_archives = 1 + len(bom.dependencies)
    print("scanned %d archives, %d findings" % (n_archives, len(findings)))
    for f in findings:
        print("  %s %s:%s %s" % (f["vulnId"], f["archive"]["name"],
                                 f["archive"]["version"], f["verdict"]))
    return exit_code_for(findings)


def _cmd_trace(args, ws: Workspace) -> int:
    bom = build_bom(ws.manifest, ws.root)
    program = corpus_program(bom)
    new_log, failures = run_tests(bom, program, pattern=args.pattern)
    merged = _load_traces(ws, bom).merge(new_log)
    ws.write_text("traces.jsonl", to_jsonl(merged))
    ws.write_json("test-failures.json",
                  {test: str(err) for test, err in sorted(failures.items())})
    tests = {e.test for e in new_log.events}
    print("traced %d tests, %d events (%d total after merge)"
          % (len(tests), len(new_log.events), len(merged.events)))
    for test in sorted(failures):
        print("  FAILED %s: %s" % (test, failures[test]), file=sys.stderr)
    return 0


def _cmd_reach(args, ws: Workspace) -> int:
    bom = build_bom(ws.manifest, ws.root)
    program = corpus_program(bom)
    graph = build_call_graph(program)
    ws.write_json("graph.json", graph_to_json(graph))
    if args.reach_command == "static":
        result = app_reachability(bom, graph)
        ws.write_json("reach-static.json", reach_to_json(result))
        label = "static"
    else:
        traces = _load_traces(ws, bom)
        result = combined_reachable(graph, traces)
        ws.write_json("reach-combined.json", reach_to_json(result))
        label = "combined"
    print("%s reachability: %d seeds, %d reached"
          % (label, len(result.seeds), len(result.reached)))
    return 0


def _cmd_mitigate(args, ws: Workspace) -> int:
    bom = build_bom(ws.manifest, ws.root)
    program = corpus_program(bom)
    graph = build_call_graph(program)
    traces = _load_traces(ws, bom)
    r_static = app_reachability(bom, graph)
    r_combined = combined_reachable(graph, traces)
    reached_union = r_static.reached | r_combined.reached | traces.executed
    kb = KnowledgeBase(ws.kb_path)
    rows = recommend(args.lib, bom, kb, graph, traces, reached_union)
    notes = deep_update_advice(ws.root, bom, kb, args.lib)
    ws.write_json("mitigation-%s.json" % args.lib,
                  {"library": args.lib, "candidates": metrics_to_json(rows),
                   "notes": notes})
    ws.write_text("mitigation-%s.csv" % args.lib, metrics_csv(rows))
    print("ranked %d update candidates for %s" % (len(rows), args.lib))
    best = rows[0]
    print("  best: %s (cs=%s de=%s rbs=%s obs=%s)"
          % (best.candidate, best.cs or "n/a",
             best.de if best.de is not None else "n/a", best.rbs, best.obs))
    for note in notes:
        print("  note: %s" % note)
    return 0


def _cmd_report(args, ws: Workspace) -> int:
    report = assemble_report(ws)
    if args.format == "html":
        path = ws.write_text("report.html", render_html(report))
    else:
        path = ws.write_json("report.json", report)
    print("wrote %s" % path)
    return exit_code_for(report["findings"])


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    ws = Workspace.discover(args.workspace, args.kb)
    try:
        if args.command == "kb":
            return _cmd_kb(args, ws)
        if args.command == "scan":
            return _cmd_scan(args, ws)
        if args.command == "trace":
            return _cmd_trace(args, ws)
        if args.command == "reach":
            return _cmd_reach(args, ws)
        if args.command == "mitigate":
            return _cmd_mitigate(args, ws)
        if args.command == "report":
            return _cmd_report(args, ws)
    except (VetError, JxError, OSError) as exc:
        print("vet: error: %s" % exc, file=sys.stderr)
        return EXIT_ERROR
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
