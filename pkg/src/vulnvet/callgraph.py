"""Whole-program call graph via class-hierarchy analysis, and reachability.

Nodes are METHOD/CONSTRUCTOR constructs. Virtual call sites fan out to every
override in corpus subtypes of the declared receiver type. Reflect.invoke
sites are never resolved statically; they land in the unresolved set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .constructs import CONSTRUCTOR, METHOD, ConstructId
from .errors import NotReached
from .jx import ast
from .jx.resolver import CtorCall, ResolvedProgram, StaticCall, VirtualCall

STATIC_DISPATCH = "STATIC_DISPATCH"
VIRTUAL_DISPATCH = "VIRTUAL_DISPATCH"
CONSTRUCTOR_CALL = "CONSTRUCTOR_CALL"
DYNAMIC = "DYNAMIC"  # trace-observed edges folded in for the combined pass


@dataclass(frozen=True, order=True)
class Edge:
    caller: ConstructId
    callee: ConstructId
    site: str  # "file:line"
    kind: str


@dataclass
class CallGraph:
    nodes: set = field(default_factory=set)
    edges: set = field(default_factory=set)
    unresolved: set = field(default_factory=set)  # (caller, site, reason)

    def successors(self):
        adj = {}
        for e in self.edges:
            adj.setdefault(e.caller, []).append(e)
        for k in adj:
            adj[k].sort()
        return adj

    def with_extra_edges(self, extra) -> "CallGraph":
        g = CallGraph(set(self.nodes), set(self.edges), set(self.unresolved))
        for e in extra:
            if e.caller in g.nodes and e.callee in g.nodes:
                g.edges.add(e)
        return g


@dataclass
class ReachResult:
    seeds: set
    reached: set
    parent: dict  # callee -> (caller, site)
    skipped_seeds: list = field(default_factory=list)


def _method_cid(owner: str, sig: str) -> ConstructId:
    return ConstructId(METHOD, "%s.%s" % (owner, sig))


def _ctor_cid(owner: str, sig: str) -> ConstructId:
    return ConstructId(CONSTRUCTOR, "%s.%s" % (owner, sig))


def _call_nodes(node, out):
    """Collect call-bearing expression nodes in evaluation order."""
    if isinstance(node, ast.Block):
        for s in node.stmts:
            _call_nodes(s, out)
    elif isinstance(node, ast.LocalDecl):
        if node.init is not None:
            _call_nodes(node.init, out)
    elif isinstance(node, ast.Assign):
        _call_nodes(node.target, out)
        _call_nodes(node.value, out)
    elif isinstance(node, ast.ExprStmt):
        _call_nodes(node.expr, out)
    elif isinstance(node, ast.If):
        _call_nodes(node.cond, out)
        _call_nodes(node.then, out)
        if node.els is not None:
            _call_nodes(node.els, out)
    elif isinstance(node, ast.While):
        _call_nodes(node.cond, out)
        _call_nodes(node.body, out)
    elif isinstance(node, ast.Return):
        if node.value is not None:
            _call_nodes(node.value, out)
    elif isinstance(node, ast.Binary):
        _call_nodes(node.left, out)
        _call_nodes(node.right, out)
    elif isinstance(node, ast.FieldAccess):
        _call_nodes(node.obj, out)
    elif isinstance(node, ast.MethodCall):
        _call_nodes(node.recv, out)
        for a in node.args:
            _call_nodes(a, out)
        out.append(node)
    elif isinstance(node, (ast.New, ast.ReflectInvoke)):
        for a in node.args:
            _call_nodes(a, out)
        out.append(node)


def build_call_graph(program: ResolvedProgram) -> CallGraph:
    graph = CallGraph()
    for qname in sorted(program.symbols):
        info = program.symbols[qname]
        for sig, m in info.methods.items():
            if m.decl.body is not None or info.is_interface:
                graph.nodes.add(_method_cid(qname, sig))
        if not info.is_interface:
            for sig in info.ctors:
                graph.nodes.add(_ctor_cid(qname, sig))

    for qname in sorted(program.symbols):
        info = program.symbols[qname]
        if info.is_interface:
            continue
        init_calls = []
        for f in info.decl.fields:
            if f.init is not None:
                _call_nodes(f.init, init_calls)
        for sig in sorted(info.ctors):
            c = info.ctors[sig]
            caller = _ctor_cid(qname, sig)
            body_calls = list(init_calls)  # initializers run at construction
            _call_nodes(c.decl.body, body_calls)
            _emit(graph, program, info, caller, body_calls)
        for sig in sorted(info.methods):
            m = info.methods[sig]
            if m.decl.body is None:
                continue
            caller = _method_cid(qname, sig)
            calls = []
            _call_nodes(m.decl.body, calls)
            _emit(graph, program, info, caller, calls)
    return graph


def _emit(graph: CallGraph, program: ResolvedProgram, info, caller, calls):
    origin = info.unit.origin
    for node in calls:
        site = "%s:%d" % (origin, node.pos[0])
        if isinstance(node, ast.ReflectInvoke):
            graph.unresolved.add((caller, site, "reflection"))
            continue
        binding = program.bindings.get(id(node))
        if binding is None:
            continue  # unbound due to upstream diagnostics
        if isinstance(binding, StaticCall):
            graph.edges.add(Edge(caller, _method_cid(binding.owner, binding.sig),
                                 site, STATIC_DISPATCH))
        elif isinstance(binding, CtorCall):
            graph.edges.add(Edge(caller, _ctor_cid(binding.owner, binding.sig),
                                 site, CONSTRUCTOR_CALL))
        elif isinstance(binding, VirtualCall):
            targets = set()
            for sub in program.subtypes_of(binding.declared_type):
                if program.symbols[sub].is_interface:
                    continue
                impl = program.resolve_impl(sub, binding.sig)
                if impl is not None:
                    targets.add(_method_cid(impl.owner, impl.sig))
            for target in sorted(targets):
                graph.edges.add(Edge(caller, target, site, VIRTUAL_DISPATCH))


def reachable(graph: CallGraph, seeds) -> ReachResult:
    """Fixpoint closure over the edge set from a seed set.

    Unknown seeds are reported and skipped. Parents are chosen per BFS level
    as the lexicographically smallest (caller qname, site) pair, making
    witness paths deterministic and shortest.
    """
    known = {s for s in seeds if s in graph.nodes}
    skipped = sorted(s for s in set(seeds) - known)
    adj = graph.successors()
    reached = set(known)
    parent = {}
    frontier = sorted(known)
    while frontier:
        candidates = {}  # callee -> best (caller qname, site, caller cid)
        for node in frontier:
            for e in adj.get(node, ()):
                if e.callee in reached:
                    continue
                key = (e.caller.qname, e.site)
                best = candidates.get(e.callee)
                if best is None or key < best[0]:
                    candidates[e.callee] = (key, e.caller, e.site)
        frontier = sorted(candidates)
        for callee in frontier:
            _, caller, site = candidates[callee]
            parent[callee] = (caller, site)
            reached.add(callee)
    return ReachResult(set(known), reached, parent, skipped)


def witness_path(result: ReachResult, target: ConstructId) -> list:
    """Seed-to-target path as (construct, entry site) pairs; the seed's site
    is None. Raises NotReached when the target was not reached."""
    if target not in result.reached:
        raise NotReached(str(target))
    path = []
    node = target
    while node not in result.seeds:
        caller, site = result.parent[node]
        path.append((node, site))
        node = caller
    path.append((node, None))
    path.reverse()
    return path


def app_reachability(bom, graph: CallGraph, restrict=None) -> ReachResult:
    """Static reachability seeded from all application METHOD/CONSTRUCTOR
    constructs (optionally restricted to a named subset of qnames)."""
    seeds = {cid for cid in bom.application.constructs
             if cid.ctype in (METHOD, CONSTRUCTOR)}
    if restrict is not None:
        restrict = set(restrict)
        seeds = {cid for cid in seeds if cid.qname in restrict}
    return reachable(graph, seeds)


def graph_to_json(graph: CallGraph) -> dict:
    return {
        "nodes": [{"ctype": n.ctype, "qname": n.qname} for n in sorted(graph.nodes)],
        "edges": [{"caller": e.caller.qname, "callee": e.callee.qname,
                   "calleeCtype": e.callee.ctype, "callerCtype": e.caller.ctype,
                   "site": e.site, "kind": e.kind}
                  for e in sorted(graph.edges)],
        "unresolved": [{"caller": c.qname, "site": s, "reason": r}
                       for c, s, r in sorted(graph.unresolved)],
    }
