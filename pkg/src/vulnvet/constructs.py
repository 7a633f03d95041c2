"""Construct identity and fingerprinting.

A construct is a package, class, interface, constructor, or method with a
globally unique qualified name (methods and constructors carry their resolved
parameter type list, e.g. ``foo.Bar.baz(int)``). Bodies are lowered to
canonical trees so that textually different but token-identical code
fingerprints identically, while any literal or identifier change is visible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .canonical import CTree, digest
from .jx import ast
from .jx.resolver import ResolvedProgram

LANG_JX = "JX"

PACKAGE = "PACKAGE"
CLASS = "CLASS"
INTERFACE = "INTERFACE"
CONSTRUCTOR = "CONSTRUCTOR"
METHOD = "METHOD"

CALLABLE_CTYPES = (METHOD, CONSTRUCTOR)


@dataclass(frozen=True, order=True)
class ConstructId:
    ctype: str
    qname: str
    language: str = LANG_JX

    def __str__(self):
        return "%s:%s" % (self.ctype, self.qname)


@dataclass
class Construct:
    id: ConstructId
    fingerprint: Optional[str]  # hex digest; None for PACKAGE
    body: Optional[CTree]       # None for PACKAGE


def fingerprint(body: CTree) -> str:
    """256-bit digest of the canonical serialization of a construct body."""
    return digest(body)


# --- lowering to canonical trees ------------------------------------------


def _type_leaf(t) -> CTree:
    return CTree("type:" + t.text())


def expr_ctree(e) -> CTree:
    if isinstance(e, ast.IntLit):
        return CTree("int:%d" % e.value)
    if isinstance(e, ast.TextLit):
        return CTree("text:" + e.value)
    if isinstance(e, ast.BoolLit):
        return CTree("bool:%s" % ("true" if e.value else "false"))
    if isinstance(e, ast.Var):
        return CTree("var:" + e.name)
    if isinstance(e, ast.This):
        return CTree("this")
    if isinstance(e, ast.FieldAccess):
        return CTree("get:" + e.name, (expr_ctree(e.obj),))
    if isinstance(e, ast.New):
        return CTree("new:" + e.type.text(), tuple(expr_ctree(a) for a in e.args))
    if isinstance(e, ast.MethodCall):
        return CTree("call:" + e.name,
                     (expr_ctree(e.recv),) + tuple(expr_ctree(a) for a in e.args))
    if isinstance(e, ast.ReflectInvoke):
        return CTree("reflect", tuple(expr_ctree(a) for a in e.args))
    if isinstance(e, ast.Binary):
        return CTree("op:" + e.op, (expr_ctree(e.left), expr_ctree(e.right)))
    raise TypeError("unknown expression node: %r" % (e,))


def stmt_ctree(s) -> CTree:
    if isinstance(s, ast.Block):
        return CTree("block", tuple(stmt_ctree(x) for x in s.stmts))
    if isinstance(s, ast.LocalDecl):
        kids = [_type_leaf(s.type)]
        if s.init is not None:
            kids.append(expr_ctree(s.init))
        return CTree("local:" + s.name, tuple(kids))
    if isinstance(s, ast.Assign):
        return CTree("assign", (expr_ctree(s.target), expr_ctree(s.value)))
    if isinstance(s, ast.ExprStmt):
        return CTree("expr", (expr_ctree(s.expr),))
    if isinstance(s, ast.If):
        kids = [expr_ctree(s.cond), stmt_ctree(s.then)]
        if s.els is not None:
            kids.append(stmt_ctree(s.els))
        return CTree("if", tuple(kids))
    if isinstance(s, ast.While):
        return CTree("while", (expr_ctree(s.cond), stmt_ctree(s.body)))
    if isinstance(s, ast.Return):
        kids = (expr_ctree(s.value),) if s.value is not None else ()
        return CTree("return", kids)
    raise TypeError("unknown statement node: %r" % (s,))


def method_ctree(m: ast.MethodDecl) -> CTree:
    """Full method body tree; the method's own parameter names are retained."""
    kids = [CTree("static:%s" % ("true" if m.static else "false")),
            _type_leaf(m.rettype)]
    kids.extend(CTree("param:" + p.name, (_type_leaf(p.type),)) for p in m.params)
    if m.body is not None:
        kids.append(stmt_ctree(m.body))
    return CTree("method:" + m.name, tuple(kids))


def ctor_ctree(c: ast.CtorDecl) -> CTree:
    kids = [CTree("param:" + p.name, (_type_leaf(p.type),)) for p in c.params]
    kids.append(stmt_ctree(c.body))
    return CTree("ctor:" + c.name, tuple(kids))


def _method_sig_ctree(m: ast.MethodDecl) -> CTree:
    # Signature only: parameter names of nested constructs are excluded.
    kids = [CTree("static:%s" % ("true" if m.static else "false")),
            _type_leaf(m.rettype)]
    kids.extend(_type_leaf(p.type) for p in m.params)
    return CTree("msig:" + m.name, tuple(kids))


def class_ctree(decl: ast.ClassDecl) -> CTree:
    """Class declaration with member bodies elided, signatures retained."""
    kids = [CTree("extends:" + (decl.extends.text() if decl.extends else "-"))]
    if decl.implements:
        kids.append(CTree("implements", tuple(CTree("iface:" + t.text())
                                              for t in decl.implements)))
    for f in decl.fields:
        fk = [_type_leaf(f.type)]
        if f.init is not None:
            fk.append(expr_ctree(f.init))
        kids.append(CTree("field:" + f.name, tuple(fk)))
    for c in decl.ctors:
        if c.synthetic:
            continue
        kids.append(CTree("csig:" + c.name, tuple(_type_leaf(p.type) for p in c.params)))
    for m in decl.methods:
        kids.append(_method_sig_ctree(m))
    return CTree("class:" + decl.name, tuple(kids))


def interface_ctree(decl: ast.InterfaceDecl) -> CTree:
    return CTree("interface:" + decl.name,
                 tuple(_method_sig_ctree(m) for m in decl.methods))


# --- extraction ------------------------------------------------------------


def extract_constructs(program: ResolvedProgram) -> dict:
    """Inventory all constructs of a resolved unit set.

    Returns an ordered map ConstructId -> Construct. Default constructors are
    synthesized by the resolver and appear as CONSTRUCTOR constructs with an
    empty body.
    """
    out = {}
    for pkg in sorted({u.package for u in program.units}):
        cid = ConstructId(PACKAGE, pkg)
        out[cid] = Construct(cid, None, None)
    for qname in sorted(program.symbols):
        info = program.symbols[qname]
        decl = info.decl
        if info.is_interface:
            body = interface_ctree(decl)
            cid = ConstructId(INTERFACE, qname)
            out[cid] = Construct(cid, fingerprint(body), body)
            for sig in sorted(info.methods):
                m = info.methods[sig]
                mbody = method_ctree(m.decl)
                mid = ConstructId(METHOD, "%s.%s" % (qname, sig))
                out[mid] = Construct(mid, fingerprint(mbody), mbody)
            continue
        body = class_ctree(decl)
        cid = ConstructId(CLASS, qname)
        out[cid] = Construct(cid, fingerprint(body), body)
        for sig in sorted(info.ctors):
            c = info.ctors[sig]
            cbody = ctor_ctree(c.decl)
            kid = ConstructId(CONSTRUCTOR, "%s.%s" % (qname, sig))
            out[kid] = Construct(kid, fingerprint(cbody), cbody)
        for sig in sorted(info.methods):
            m = info.methods[sig]
            mbody = method_ctree(m.decl)
            mid = ConstructId(METHOD, "%s.%s" % (qname, sig))
            out[mid] = Construct(mid, fingerprint(mbody), mbody)
    return out


# --- version ordering ------------------------------------------------------


def version_key(version: str) -> tuple:
    """Order key for dot-separated numeric versions; trailing zeros ignored."""
    try:
        parts = [int(p) for p in version.split(".")]
    except ValueError:
        raise ValueError("not a dot-separated numeric version: %r" % version)
    while parts and parts[-1] == 0:
        parts.pop()
    return tuple(parts)


def version_newer(a: str, b: str) -> bool:
    """True when version a is strictly newer than b."""
    return version_key(a) > version_key(b)
