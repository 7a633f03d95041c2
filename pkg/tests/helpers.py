"""Shared fixtures paths, random generators, and independent oracles."""

from __future__ import annotations

import itertools
import shutil
from pathlib import Path

from vulnvet.canonical import CTree
from vulnvet.kb import KnowledgeBase

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"
UPDATE = FIXTURES / "update"


def copy_workspace(src: Path, dst: Path) -> Path:
    shutil.copytree(src, dst)
    return dst


def build_golden_kb(kb_root: Path) -> KnowledgeBase:
    kb = KnowledgeBase(kb_root)
    kb.import_fix("VULN-J1", GOLDEN / "fixes/j1/before", GOLDEN / "fixes/j1/after")
    kb.import_fix("VULN-J2", GOLDEN / "fixes/j2/before", GOLDEN / "fixes/j2/after")
    return kb


# --- random ordered trees ---

def random_ctree(rng, max_nodes: int, labels=("a", "b", "c")) -> CTree:
    """Random ordered tree with 1..max_nodes nodes."""
    budget = rng.randint(1, max_nodes)

    def grow(budget):
        label = rng.choice(labels)
        budget -= 1
        children = []
        while budget > 0 and rng.random() < 0.6:
            take = rng.randint(1, budget)
            children.append(grow(take))
            budget -= take
        return CTree(label, tuple(children))

    return grow(budget)


def enum_trees(n: int, labels) -> list:
    """All ordered trees with exactly n nodes over the label alphabet."""
    if n == 0:
        return []
    out = []
    for label in labels:
        for forest in _enum_forests(n - 1, labels):
            out.append(CTree(label, forest))
    return out


def _enum_forests(n: int, labels) -> list:
    if n == 0:
        return [()]
    out = []
    for first_size in range(1, n + 1):
        for first in enum_trees(first_size, labels):
            for rest in _enum_forests(n - first_size, labels):
                out.append((first,) + rest)
    return out


def tree_size(t: CTree) -> int:
    return 1 + sum(tree_size(c) for c in t.children)


# --- exhaustive edit-mapping oracle for tree edit distance ---
#
# Edit distance equals the cheapest node mapping: unmapped source nodes are
# deletions, unmapped target nodes insertions, mapped pairs with different
# labels relabelings. A mapping is valid exactly when deleting the unmapped
# nodes from both trees (splicing children into the deleted node's place)
# leaves two forests of identical shape. This enumerates every kept-subset
# of both trees and takes the minimum, which is independent of any dynamic
# programming recurrence.

def _preorder(t: CTree, out):
    out.append(t)
    for c in t.children:
        _preorder(c, out)
    return out


def _splice(t: CTree, kept) -> tuple:
    sub = []
    for c in t.children:
        sub.extend(_splice(c, kept))
    if id(t) in kept:
        desc = tuple(itertools.chain.from_iterable((s[1],) + s[2] for s in sub))
        return [(tuple(s[0] for s in sub), t.label, desc)]
    return sub


def _forest_key(spliced):
    # (shape, preorder labels) of a spliced forest
    shapes = tuple(s[0] for s in spliced)
    labels = tuple(itertools.chain.from_iterable(
        (s[1],) + s[2] for s in spliced))
    return shapes, labels


def _splice_variants(t: CTree):
    nodes = _preorder(t, [])
    n = len(nodes)
    for mask in range(1 << n):
        kept = {id(nodes[i]) for i in range(n) if mask >> i & 1}
        shapes, labels = _forest_key(_splice(t, kept))
        yield shapes, labels, n - len(kept)


def ted_oracle(a: CTree, b: CTree) -> int:
    by_shape = {}
    for shapes, labels, deleted in _splice_variants(a):
        by_shape.setdefault(shapes, []).append((labels, deleted))
    best = None
    for shapes, labels_b, inserted in _splice_variants(b):
        for labels_a, deleted in by_shape.get(shapes, ()):
            relabels = sum(1 for x, y in zip(labels_a, labels_b) if x != y)
            cost = deleted + inserted + relabels
            if best is None or cost < best:
                best = cost
    return best


# --- naive reachability closure oracle ---

def closure_oracle(graph, seeds) -> set:
    """Edge-scan fixpoint, no adjacency index, no BFS ordering."""
    reached = {s for s in seeds if s in graph.nodes}
    changed = True
    while changed:
        changed = False
        for e in graph.edges:
            if e.caller in reached and e.callee not in reached:
                reached.add(e.callee)
                changed = True
    return reached


# --- random JX program model (rendered to source text) ---

class ProgramModel:
    """A package of classes whose method bodies are determined by three
    integer literals, so revisions can be mutated structurally."""

    def __init__(self, package="p"):
        self.package = package
        self.classes = {}  # class name -> {method name: (l0, l1, l2)}

    def clone(self):
        m = ProgramModel(self.package)
        m.classes = {c: dict(ms) for c, ms in self.classes.items()}
        return m

    def render(self) -> str:
        lines = ["package %s;" % self.package, ""]
        for cname in sorted(self.classes):
            lines.append("class %s {" % cname)
            for mname in sorted(self.classes[cname]):
                l0, l1, l2 = self.classes[cname][mname]
                lines.append("    static int %s(int a) {" % mname)
                lines.append("        int v;")
                lines.append("        v = a + %d;" % l0)
                lines.append("        v = v * %d;" % l1)
                lines.append("        return v + %d;" % l2)
                lines.append("    }")
            lines.append("}")
        return "\n".join(lines) + "\n"

    def write(self, root: Path) -> Path:
        root.mkdir(parents=True, exist_ok=True)
        (root / "unit.jx").write_text(self.render(), encoding="utf-8")
        return root


def random_program(rng, n_classes=2, n_methods=3) -> ProgramModel:
    m = ProgramModel()
    for i in range(rng.randint(1, n_classes)):
        cname = "C%d" % i
        m.classes[cname] = {}
        for j in range(rng.randint(1, n_methods)):
            m.classes[cname]["m%d" % j] = (rng.randint(0, 9), rng.randint(1, 9),
                                           rng.randint(0, 9))
    return m


def mutate(rng, model: ProgramModel) -> ProgramModel:
    """One random revision step: tweak a literal, add, or drop a method."""
    m = model.clone()
    roll = rng.random()
    cname = rng.choice(sorted(m.classes))
    methods = m.classes[cname]
    if roll < 0.6 and methods:
        mname = rng.choice(sorted(methods))
        l0, l1, l2 = methods[mname]
        methods[mname] = (l0, l1, rng.randint(10, 99))
    elif roll < 0.8:
        methods["m%d" % rng.randint(10, 99)] = (rng.randint(0, 9),
                                                rng.randint(1, 9),
                                                rng.randint(0, 9))
    elif len(methods) > 1:
        del methods[rng.choice(sorted(methods))]
    else:
        methods["m%d" % rng.randint(10, 99)] = (1, 2, 3)
    return m
