"""Name resolution, class hierarchy, and call binding for a closed JX corpus.

Types are represented as strings: the four primitives or the fully-qualified
class/interface name. Method signatures are ``name(type,...)`` with resolved
parameter types, which is also the member part of construct identifiers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import ast
from .errors import ResolutionError

ERROR_TYPE = "?"  # poisons downstream checks without cascading diagnostics


@dataclass
class MethodInfo:
    owner: str
    sig: str
    static: bool
    rettype: str
    param_types: list
    decl: ast.MethodDecl


@dataclass
class CtorInfo:
    owner: str
    sig: str
    param_types: list
    decl: ast.CtorDecl


@dataclass
class TypeInfo:
    qname: str
    package: str
    is_interface: bool
    decl: object
    unit: ast.SourceUnit
    supertypes: list = field(default_factory=list)  # direct, resolved qnames
    fields: dict = field(default_factory=dict)      # name -> type
    methods: dict = field(default_factory=dict)     # sig -> MethodInfo
    ctors: dict = field(default_factory=dict)       # sig -> CtorInfo


@dataclass
class StaticCall:
    owner: str
    sig: str


@dataclass
class VirtualCall:
    declared_type: str
    sig: str


@dataclass
class CtorCall:
    owner: str
    sig: str


class ResolvedProgram:
    """Immutable view of a fully resolved corpus."""

    def __init__(self, units, symbols, hierarchy, diagnostics, warnings,
                 bindings, expr_types, overrides):
        self.units = units
        self.symbols = symbols          # qname -> TypeInfo
        self.hierarchy = hierarchy      # qname -> tuple of direct supertypes
        self.diagnostics = diagnostics  # list of error strings
        self.warnings = warnings        # list of non-fatal strings (shadowing)
        self.bindings = bindings        # id(call node) -> StaticCall|VirtualCall|CtorCall
        self.expr_types = expr_types    # id(expr node) -> type string
        self.overrides = overrides      # (owner, sig) -> set of (owner, sig) overridden

    def require_clean(self):
        if self.diagnostics:
            raise ResolutionError(self.diagnostics)
        return self

    # --- hierarchy queries ---

    def supertypes_transitive(self, qname: str) -> set:
        out = set()
        work = list(self.hierarchy.get(qname, ()))
        while work:
            t = work.pop()
            if t in out:
                continue
            out.add(t)
            work.extend(self.hierarchy.get(t, ()))
        return out

    def is_subtype(self, sub: str, sup: str) -> bool:
        return sub == sup or sup in self.supertypes_transitive(sub)

    def subtypes_of(self, qname: str) -> set:
        """All corpus types that are qname or a transitive subtype of it."""
        return {t for t in self.symbols if self.is_subtype(t, qname)}

    # --- member lookup ---

    def lookup_field(self, type_qname: str, name: str) -> Optional[str]:
        info = self.symbols.get(type_qname)
        while info is not None:
            if name in info.fields:
                return info.fields[name]
            parent = next((s for s in info.supertypes
                           if s in self.symbols and not self.symbols[s].is_interface), None)
            info = self.symbols.get(parent) if parent else None
        return None

    def lookup_method(self, type_qname: str, sig: str) -> Optional[MethodInfo]:
        """Instance-method lookup along the class chain, then interfaces."""
        seen = set()
        work = [type_qname]
        while work:
            t = work.pop(0)
            if t in seen or t not in self.symbols:
                continue
            seen.add(t)
            info = self.symbols[t]
            m = info.methods.get(sig)
            if m is not None and not m.static:
                return m
            work.extend(info.supertypes)
        return None

    def resolve_impl(self, runtime_class: str, sig: str) -> Optional[MethodInfo]:
        """Dynamic-dispatch target: nearest class-chain implementation with a body."""
        info = self.symbols.get(runtime_class)
        while info is not None:
            m = info.methods.get(sig)
            if m is not None and not m.static and m.decl.body is not None:
                return m
            parent = next((s for s in info.supertypes
                           if s in self.symbols and not self.symbols[s].is_interface), None)
            info = self.symbols.get(parent) if parent else None
        return None


class _Resolver:
    def __init__(self, units, precedence):
        # Deterministic processing order regardless of input enumeration.
        self.units = sorted(units, key=lambda u: (u.package, u.origin))
        self.precedence = precedence or {}
        self.symbols = {}
        self.diagnostics = []
        self.warnings = []
        self.bindings = {}
        self.expr_types = {}
        self.overrides = {}
        self.hierarchy = {}

    def err(self, msg, pos=None, unit=None):
        where = ""
        if unit is not None and pos is not None:
            where = "%s:%d:%d: " % (unit.origin, pos[0], pos[1])
        self.diagnostics.append(where + msg)

    # --- pass 1: symbol collection ---

    def collect(self):
        for unit in self.units:
            for decl in unit.decls:
                qname = unit.package + "." + decl.name
                if qname in self.symbols:
                    other = self.symbols[qname]
                    mine = self.precedence.get(unit.origin, 0)
                    theirs = self.precedence.get(other.unit.origin, 0)
                    if mine == theirs:
                        self.err("duplicate qualified name %s (also in %s)"
                                 % (qname, other.unit.origin), decl.pos, unit)
                        continue
                    if mine < theirs:
                        self.warnings.append(
                            "type %s from %s shadows the declaration in %s"
                            % (qname, unit.origin, other.unit.origin))
                    else:
                        self.warnings.append(
                            "type %s from %s is shadowed by the declaration in %s"
                            % (qname, unit.origin, other.unit.origin))
                        continue
                self.symbols[qname] = TypeInfo(
                    qname=qname, package=unit.package,
                    is_interface=isinstance(decl, ast.InterfaceDecl),
                    decl=decl, unit=unit)

    def resolve_type_name(self, named: ast.NamedType, pkg: str) -> Optional[str]:
        dotted = named.text()
        if dotted in self.symbols:
            return dotted
        qualified = pkg + "." + dotted
        if qualified in self.symbols:
            return qualified
        return None

    def type_text(self, t, pkg: str) -> str:
        """Resolved textual form of a declared type, for signatures and ids."""
        if isinstance(t, ast.PrimType):
            return t.name
        resolved = self.resolve_type_name(t, pkg)
        return resolved if resolved is not None else t.text()

    # --- pass 2: supertypes, members, default constructors ---

    def build_members(self):
        for info in self.symbols.values():
            decl = info.decl
            if info.is_interface:
                self.hierarchy[info.qname] = ()
                for m in decl.methods:
                    self._add_method(info, m)
                continue
            supers = []
            if decl.extends is not None:
                sup = self.resolve_type_name(decl.extends, info.package)
                if sup is None:
                    self.err("unknown supertype %s" % decl.extends.text(), decl.pos, info.unit)
                elif self.symbols[sup].is_interface:
                    self.err("class %s extends interface %s" % (info.qname, sup),
                             decl.pos, info.unit)
                else:
                    supers.append(sup)
            for iface in decl.implements:
                it = self.resolve_type_name(iface, info.package)
                if it is None:
                    self.err("unknown interface %s" % iface.text(), decl.pos, info.unit)
                elif not self.symbols[it].is_interface:
                    self.err("class %s implements non-interface %s" % (info.qname, it),
                             decl.pos, info.unit)
                else:
                    supers.append(it)
            info.supertypes = supers
            self.hierarchy[info.qname] = tuple(supers)
            for f in decl.fields:
                if f.name in info.fields:
                    self.err("duplicate field %s" % f.name, f.pos, info.unit)
                info.fields[f.name] = self.type_text(f.type, info.package)
            for m in decl.methods:
                self._add_method(info, m)
            if not decl.ctors:
                decl.ctors.append(ast.CtorDecl(decl.name, [], ast.Block([], decl.pos),
                                               decl.pos, synthetic=True))
            for c in decl.ctors:
                ptypes = [self.type_text(p.type, info.package) for p in c.params]
                sig = "%s(%s)" % (c.name, ",".join(ptypes))
                if sig in info.ctors:
                    self.err("duplicate constructor %s" % sig, c.pos, info.unit)
                info.ctors[sig] = CtorInfo(info.qname, sig, ptypes, c)

    def _add_method(self, info: TypeInfo, m: ast.MethodDecl):
        ptypes = [self.type_text(p.type, info.package) for p in m.params]
        sig = "%s(%s)" % (m.name, ",".join(ptypes))
        if sig in info.methods:
            self.err("duplicate method %s in %s" % (sig, info.qname), m.pos, info.unit)
        info.methods[sig] = MethodInfo(info.qname, sig, m.static,
                                       self.type_text(m.rettype, info.package), ptypes, m)

    def check_acyclic(self):
        state = {}  # 0 visiting, 1 done

        def visit(q, trail):
            if state.get(q) == 1:
                return
            if state.get(q) == 0:
                cycle = trail[trail.index(q):] + [q]
                self.err("inheritance cycle: %s" % " -> ".join(cycle))
                state[q] = 1
                return
            state[q] = 0
            for s in self.hierarchy.get(q, ()):
                visit(s, trail + [q])
            state[q] = 1

        for q in sorted(self.hierarchy):
            visit(q, [])
        # Break cycles so later transitive walks terminate.
        if any("inheritance cycle" in d for d in self.diagnostics):
            broken = set()
            for q in sorted(self.hierarchy):
                kept = []
                for s in self.hierarchy[q]:
                    if (s, q) in broken or s == q:
                        continue
                    kept.append(s)
                    broken.add((q, s))
                self.hierarchy[q] = tuple(kept)
                if q in self.symbols:
                    self.symbols[q].supertypes = list(kept)
            # Remove edges that still close a cycle (self references removed above).
            for q in sorted(self.hierarchy):
                kept = []
                for s in self.hierarchy[q]:
                    if not self._reaches(s, q):
                        kept.append(s)
                self.hierarchy[q] = tuple(kept)
                if q in self.symbols:
                    self.symbols[q].supertypes = list(kept)

    def _reaches(self, start, goal):
        seen = set()
        work = [start]
        while work:
            t = work.pop()
            if t == goal:
                return True
            if t in seen:
                continue
            seen.add(t)
            work.extend(self.hierarchy.get(t, ()))
        return False

    # --- pass 3: body binding ---

    def bind_all(self, program: ResolvedProgram):
        for qname in sorted(self.symbols):
            info = self.symbols[qname]
            if info.is_interface:
                continue
            for f in info.decl.fields:
                if f.init is not None:
                    env = {"this": info.qname}
                    self.bind_expr(f.init, env, info, program)
            for c in info.ctors.values():
                env = {"this": info.qname}
                for p, t in zip(c.decl.params, c.param_types):
                    env[p.name] = t
                self.bind_block(c.decl.body, env, info, program, "void")
            for m in info.methods.values():
                if m.decl.body is None:
                    continue
                env = {} if m.static else {"this": info.qname}
                for p, t in zip(m.decl.params, m.param_types):
                    env[p.name] = t
                self.bind_block(m.decl.body, env, info, program, m.rettype)

    def assignable(self, target: str, value: str, program) -> bool:
        if ERROR_TYPE in (target, value):
            return True
        if target == value:
            return True
        if target in self.symbols and value in self.symbols:
            return program.is_subtype(value, target)
        return False

    def bind_block(self, block, env, info, program, rettype):
        scope = dict(env)
        for s in block.stmts:
            self.bind_stmt(s, scope, info, program, rettype)

    def bind_stmt(self, s, env, info, program, rettype):
        unit = info.unit
        if isinstance(s, ast.Block):
            self.bind_block(s, env, info, program, rettype)
        elif isinstance(s, ast.LocalDecl):
            t = self.type_text(s.type, info.package)
            if isinstance(s.type, ast.NamedType) and t not in self.symbols:
                self.err("unknown type %s" % s.type.text(), s.pos, unit)
                t = ERROR_TYPE
            if s.init is not None:
                vt = self.bind_expr(s.init, env, info, program)
                if not self.assignable(t, vt, program):
                    self.err("cannot initialize %s %s with %s" % (t, s.name, vt), s.pos, unit)
            env[s.name] = t
        elif isinstance(s, ast.Assign):
            tt = self.bind_expr(s.target, env, info, program)
            vt = self.bind_expr(s.value, env, info, program)
            if not self.assignable(tt, vt, program):
                self.err("cannot assign %s to %s" % (vt, tt), s.pos, unit)
        elif isinstance(s, ast.ExprStmt):
            self.bind_expr(s.expr, env, info, program)
        elif isinstance(s, ast.If):
            ct = self.bind_expr(s.cond, env, info, program)
            if ct not in ("boolean", ERROR_TYPE):
                self.err("if condition must be boolean, got %s" % ct, s.pos, unit)
            self.bind_stmt(s.then, dict(env), info, program, rettype)
            if s.els is not None:
                self.bind_stmt(s.els, dict(env), info, program, rettype)
        elif isinstance(s, ast.While):
            ct = self.bind_expr(s.cond, env, info, program)
            if ct not in ("boolean", ERROR_TYPE):
                self.err("while condition must be boolean, got %s" % ct, s.pos, unit)
            self.bind_stmt(s.body, dict(env), info, program, rettype)
        elif isinstance(s, ast.Return):
            if s.value is None:
                if rettype not in ("void", ERROR_TYPE):
                    self.err("missing return value (expected %s)" % rettype, s.pos, unit)
            else:
                vt = self.bind_expr(s.value, env, info, program)
                if rettype == "void":
                    self.err("void member returns a value", s.pos, unit)
                elif not self.assignable(rettype, vt, program):
                    self.err("return type mismatch: %s vs %s" % (vt, rettype), s.pos, unit)

    def _name_chain(self, e):
        """Flatten a pure Var/FieldAccess chain into dotted parts, or None."""
        parts = []
        while isinstance(e, ast.FieldAccess):
            parts.append(e.name)
            e = e.obj
        if isinstance(e, ast.Var):
            parts.append(e.name)
            return list(reversed(parts))
        return None

    def bind_expr(self, e, env, info, program) -> str:
        t = self._bind_expr(e, env, info, program)
        self.expr_types[id(e)] = t
        return t

    def _bind_expr(self, e, env, info, program) -> str:
        unit = info.unit
        if isinstance(e, ast.IntLit):
            return "int"
        if isinstance(e, ast.TextLit):
            return "text"
        if isinstance(e, ast.BoolLit):
            return "boolean"
        if isinstance(e, ast.This):
            if "this" not in env:
                self.err("this used in a static context", e.pos, unit)
                return ERROR_TYPE
            return env["this"]
        if isinstance(e, ast.Var):
            if e.name in env:
                return env[e.name]
            ft = program.lookup_field(info.qname, e.name)
            if ft is not None and "this" in env:
                return ft
            self.err("unknown name %s" % e.name, e.pos, unit)
            return ERROR_TYPE
        if isinstance(e, ast.FieldAccess):
            chain = self._name_chain(e)
            if chain is not None and chain[0] not in env:
                tq = self.resolve_type_name(ast.NamedType(tuple(chain)), info.package)
                if tq is not None:
                    self.err("type %s used as a value" % tq, e.pos, unit)
                    return ERROR_TYPE
            ot = self.bind_expr(e.obj, env, info, program)
            if ot == ERROR_TYPE:
                return ERROR_TYPE
            if ot not in self.symbols:
                self.err("type %s has no fields" % ot, e.pos, unit)
                return ERROR_TYPE
            ft = program.lookup_field(ot, e.name)
            if ft is None:
                self.err("unknown field %s.%s" % (ot, e.name), e.pos, unit)
                return ERROR_TYPE
            return ft
        if isinstance(e, ast.New):
            tq = self.resolve_type_name(e.type, info.package)
            if tq is None:
                self.err("unknown type %s" % e.type.text(), e.pos, unit)
                return ERROR_TYPE
            if self.symbols[tq].is_interface:
                self.err("cannot instantiate interface %s" % tq, e.pos, unit)
                return ERROR_TYPE
            argts = [self.bind_expr(a, env, info, program) for a in e.args]
            if ERROR_TYPE in argts:
                return tq
            sig = "%s(%s)" % (self.symbols[tq].decl.name, ",".join(argts))
            if sig not in self.symbols[tq].ctors:
                self.err("no constructor %s in %s" % (sig, tq), e.pos, unit)
                return tq
            self.bindings[id(e)] = CtorCall(tq, sig)
            return tq
        if isinstance(e, ast.ReflectInvoke):
            for a in e.args:
                self.bind_expr(a, env, info, program)
            tt = self.expr_types.get(id(e.args[0]))
            if tt not in ("text", ERROR_TYPE):
                self.err("Reflect.invoke target must be text", e.pos, unit)
            return "void"
        if isinstance(e, ast.Binary):
            lt = self.bind_expr(e.left, env, info, program)
            rt = self.bind_expr(e.right, env, info, program)
            if e.op in ("+", "-", "*", "/"):
                if not {lt, rt} <= {"int", ERROR_TYPE}:
                    self.err("operator %s requires int operands" % e.op, e.pos, unit)
                return "int"
            if e.op in ("<", ">"):
                if not {lt, rt} <= {"int", ERROR_TYPE}:
                    self.err("operator %s requires int operands" % e.op, e.pos, unit)
                return "boolean"
            if ERROR_TYPE not in (lt, rt) and lt != rt:
                self.err("operator %s requires equal types, got %s and %s"
                         % (e.op, lt, rt), e.pos, unit)
            return "boolean"
        if isinstance(e, ast.MethodCall):
            return self._bind_call(e, env, info, program)
        raise TypeError("unknown expression node: %r" % (e,))

    def _bind_call(self, e: ast.MethodCall, env, info, program) -> str:
        unit = info.unit
        chain = self._name_chain(e.recv)
        as_type = None
        if chain is not None and chain[0] not in env:
            head_is_field = ("this" in env
                            and program.lookup_field(info.qname, chain[0]) is not None)
            if not head_is_field:
                as_type = self.resolve_type_name(ast.NamedType(tuple(chain)), info.package)
                if as_type is None:
                    self.err("unknown name %s" % ".".join(chain), e.pos, unit)
                    for a in e.args:
                        self.bind_expr(a, env, info, program)
                    return ERROR_TYPE
        argts = [self.bind_expr(a, env, info, program) for a in e.args]
        if ERROR_TYPE in argts:
            return ERROR_TYPE
        sig = "%s(%s)" % (e.name, ",".join(argts))
        if as_type is not None:
            tinfo = self.symbols[as_type]
            m = tinfo.methods.get(sig)
            if m is None or not m.static:
                self.err("no static method %s in %s" % (sig, as_type), e.pos, unit)
                return ERROR_TYPE
            self.bindings[id(e)] = StaticCall(as_type, sig)
            return m.rettype
        rt = self.bind_expr(e.recv, env, info, program)
        if rt == ERROR_TYPE:
            return ERROR_TYPE
        if rt not in self.symbols:
            self.err("type %s has no methods" % rt, e.pos, unit)
            return ERROR_TYPE
        m = program.lookup_method(rt, sig)
        if m is None:
            self.err("no method %s in %s" % (sig, rt), e.pos, unit)
            return ERROR_TYPE
        self.bindings[id(e)] = VirtualCall(rt, sig)
        return m.rettype

    def compute_overrides(self, program: ResolvedProgram):
        for qname in sorted(self.symbols):
            info = self.symbols[qname]
            if info.is_interface:
                continue
            for sig, m in info.methods.items():
                if m.static:
                    continue
                overridden = set()
                for sup in sorted(program.supertypes_transitive(qname)):
                    sinfo = self.symbols.get(sup)
                    if sinfo is None:
                        continue
                    sm = sinfo.methods.get(sig)
                    if sm is not None and not sm.static:
                        overridden.add((sup, sig))
                if overridden:
                    self.overrides[(qname, sig)] = overridden


def resolve(units, precedence=None) -> ResolvedProgram:
    """Resolve a closed set of units into one program.

    precedence: optional map origin -> depth (0 = application) used to pick a
    winner for duplicate qualified names across archives; ties are errors.
    """
    r = _Resolver(list(units), precedence)
    r.collect()
    r.build_members()
    r.check_acyclic()
    program = ResolvedProgram(r.units, r.symbols, r.hierarchy, r.diagnostics,
                              r.warnings, r.bindings, r.expr_types, r.overrides)
    r.bind_all(program)
    r.compute_overrides(program)
    return program
