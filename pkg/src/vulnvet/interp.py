"""Tree-walking interpreter for JX with construct-level execution tracing.

Every method/constructor entry appends a trace event, so a run's TraceLog is
the dynamic analog of bytecode instrumentation. Reflect.invoke resolves its
target by fully-qualified construct name at run time; the resulting call is
traced like any other, which is what gives the combined analysis its extra
edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .constructs import CONSTRUCTOR, METHOD, ConstructId
from .errors import NoTestsMatched
from .jx import ast
from .jx.resolver import CtorCall, ResolvedProgram, StaticCall, VirtualCall
from .traces import TraceEvent, TraceLog, normalize

DEFAULT_STEP_BUDGET = 1_000_000


class JxRuntimeError(Exception):
    pass


class RuntimeTypeError(JxRuntimeError):
    pass


class DivisionByZero(JxRuntimeError):
    pass


class UnknownReflectTarget(JxRuntimeError):
    pass


class StepBudgetExceeded(JxRuntimeError):
    pass


@dataclass
class Obj:
    cls: str
    fields: dict = field(default_factory=dict)


class _Return(Exception):
    def __init__(self, value):
        self.value = value


_DEFAULTS = {"int": 0, "boolean": False, "text": ""}


@dataclass
class RunResult:
    value: object
    error: Optional[str]
    log: TraceLog


_MISSING = object()


class _Env:
    """Lexical scope chain; assignment writes to the declaring frame."""

    __slots__ = ("vars", "parent")

    def __init__(self, parent=None, initial=None):
        self.vars = dict(initial or {})
        self.parent = parent

    def get(self, name):
        env = self
        while env is not None:
            if name in env.vars:
                return env.vars[name]
            env = env.parent
        return _MISSING

    def set(self, name, value) -> bool:
        env = self
        while env is not None:
            if name in env.vars:
                env.vars[name] = value
                return True
            env = env.parent
        return False

    def declare(self, name, value):
        self.vars[name] = value


class Interpreter:
    def __init__(self, program: ResolvedProgram, step_budget: int = DEFAULT_STEP_BUDGET):
        self.program = program
        self.step_budget = step_budget
        self.steps = 0
        self.ts = 0
        self.events = []
        self.test_name = ""

    # --- tracing ---

    def _trace(self, callee: ConstructId, caller: Optional[ConstructId],
               site: Optional[str]):
        self.ts += 1
        self.events.append(TraceEvent(callee, caller, site, self.ts, self.test_name))

    def _tick(self):
        self.steps += 1
        if self.steps > self.step_budget:
            raise StepBudgetExceeded("step budget of %d exceeded" % self.step_budget)

    # --- entry points ---

    def run_entry(self, entry: ConstructId, args=None, test_name: str = "") -> RunResult:
        """Execute a static method as program entry; always returns the
        (possibly partial) trace log."""
        owner, sig = _split_member(entry.qname)
        info = self.program.symbols.get(owner)
        m = info.methods.get(sig) if info else None
        if m is None or not m.static:
            raise RuntimeTypeError("no static method %s" % entry.qname)
        call_args = list(args or [])
        if len(call_args) != len(m.param_types):
            raise RuntimeTypeError("entry %s expects %d argument(s)"
                                   % (entry.qname, len(m.param_types)))
        self.test_name = test_name
        error = None
        value = None
        try:
            value = self._invoke_static(owner, m, call_args, None, None)
        except JxRuntimeError as exc:
            error = "%s: %s" % (type(exc).__name__, exc)
        return RunResult(value, error, normalize(TraceLog(self.events)))

    # --- invocation ---

    def _invoke_static(self, owner, minfo, args, caller, site):
        cid = ConstructId(METHOD, "%s.%s" % (owner, minfo.sig))
        self._trace(cid, caller, site)
        env = _Env(initial={p.name: v for p, v in zip(minfo.decl.params, args)})
        return self._run_body(minfo.decl.body, env, None, cid,
                              self.program.symbols[owner].unit.origin)

    def _invoke_virtual(self, obj: Obj, sig, args, caller, site):
        impl = self.program.resolve_impl(obj.cls, sig)
        if impl is None:
            raise RuntimeTypeError("no implementation of %s for %s" % (sig, obj.cls))
        cid = ConstructId(METHOD, "%s.%s" % (impl.owner, impl.sig))
        self._trace(cid, caller, site)
        env = _Env(initial={p.name: v for p, v in zip(impl.decl.params, args)})
        return self._run_body(impl.decl.body, env, obj,
                              cid, self.program.symbols[impl.owner].unit.origin)

    def _construct(self, owner, sig, args, caller, site):
        info = self.program.symbols[owner]
        cinfo = info.ctors[sig]
        cid = ConstructId(CONSTRUCTOR, "%s.%s" % (owner, sig))
        self._trace(cid, caller, site)
        obj = Obj(owner)
        chain = []
        cursor = info
        while cursor is not None:
            chain.append(cursor)
            parent = next((s for s in cursor.supertypes
                           if s in self.program.symbols
                           and not self.program.symbols[s].is_interface), None)
            cursor = self.program.symbols.get(parent) if parent else None
        for tinfo in reversed(chain):  # supertype fields first
            for f in tinfo.decl.fields:
                obj.fields[f.name] = _DEFAULTS.get(tinfo.fields[f.name], None)
            for f in tinfo.decl.fields:
                if f.init is not None:
                    obj.fields[f.name] = self._eval(f.init, _Env(), obj, cid,
                                                    tinfo.unit.origin)
        env = _Env(initial={p.name: v for p, v in zip(cinfo.decl.params, args)})
        self._run_body(cinfo.decl.body, env, obj, cid, info.unit.origin)
        return obj

    def _run_body(self, block, env, this, current_cid, origin):
        try:
            self._exec_block(block, env, this, current_cid, origin)
        except _Return as r:
            return r.value
        return None

    # --- statements ---

    def _exec_block(self, block, env, this, cid, origin):
        scope = _Env(parent=env)
        for s in block.stmts:
            self._exec(s, scope, this, cid, origin)

    def _exec(self, s, env, this, cid, origin):
        self._tick()
        if isinstance(s, ast.Block):
            self._exec_block(s, env, this, cid, origin)
        elif isinstance(s, ast.LocalDecl):
            if s.init is not None:
                env.declare(s.name, self._eval(s.init, env, this, cid, origin))
            else:
                env.declare(s.name, _DEFAULTS.get(s.type.text(), None))
        elif isinstance(s, ast.Assign):
            value = self._eval(s.value, env, this, cid, origin)
            if isinstance(s.target, ast.Var):
                if env.set(s.target.name, value):
                    pass
                elif this is not None and s.target.name in this.fields:
                    this.fields[s.target.name] = value
                else:
                    raise RuntimeTypeError("unbound assignment target %s" % s.target.name)
            else:  # field access
                obj = self._eval(s.target.obj, env, this, cid, origin)
                if not isinstance(obj, Obj):
                    raise RuntimeTypeError("field assignment on a non-object")
                obj.fields[s.target.name] = value
        elif isinstance(s, ast.ExprStmt):
            self._eval(s.expr, env, this, cid, origin)
        elif isinstance(s, ast.If):
            if self._truth(self._eval(s.cond, env, this, cid, origin)):
                self._exec(s.then, _Env(parent=env), this, cid, origin)
            elif s.els is not None:
                self._exec(s.els, _Env(parent=env), this, cid, origin)
        elif isinstance(s, ast.While):
            while self._truth(self._eval(s.cond, env, this, cid, origin)):
                self._exec(s.body, _Env(parent=env), this, cid, origin)
        elif isinstance(s, ast.Return):
            value = None
            if s.value is not None:
                value = self._eval(s.value, env, this, cid, origin)
            raise _Return(value)
        else:
            raise RuntimeTypeError("unknown statement %r" % (s,))

    def _truth(self, value):
        if not isinstance(value, bool):
            raise RuntimeTypeError("condition did not evaluate to boolean")
        return value

    # --- expressions ---

    def _eval(self, e, env, this, cid, origin):
        self._tick()
        if isinstance(e, ast.IntLit):
            return e.value
        if isinstance(e, ast.TextLit):
            return e.value
        if isinstance(e, ast.BoolLit):
            return e.value
        if isinstance(e, ast.This):
            return this
        if isinstance(e, ast.Var):
            value = env.get(e.name)
            if value is not _MISSING:
                return value
            if this is not None and e.name in this.fields:
                return this.fields[e.name]
            raise RuntimeTypeError("unbound name %s" % e.name)
        if isinstance(e, ast.FieldAccess):
            obj = self._eval(e.obj, env, this, cid, origin)
            if not isinstance(obj, Obj):
                raise RuntimeTypeError("field access on a non-object")
            if e.name not in obj.fields:
                raise RuntimeTypeError("object of %s has no field %s" % (obj.cls, e.name))
            return obj.fields[e.name]
        if isinstance(e, ast.Binary):
            left = self._eval(e.left, env, this, cid, origin)
            right = self._eval(e.right, env, this, cid, origin)
            return self._binary(e.op, left, right)
        site = "%s:%d" % (origin, e.pos[0])
        if isinstance(e, ast.New):
            binding = self.program.bindings.get(id(e))
            if not isinstance(binding, CtorCall):
                raise RuntimeTypeError("unresolved constructor call at %s" % site)
            args = [self._eval(a, env, this, cid, origin) for a in e.args]
            return self._construct(binding.owner, binding.sig, args, cid, site)
        if isinstance(e, ast.ReflectInvoke):
            args = [self._eval(a, env, this, cid, origin) for a in e.args]
            target = args[0]
            if not isinstance(target, str):
                raise RuntimeTypeError("Reflect.invoke target must be text")
            owner, minfo = self._resolve_reflect(target, len(args) - 1)
            return self._invoke_static(owner, minfo, args[1:], cid, site)
        if isinstance(e, ast.MethodCall):
            binding = self.program.bindings.get(id(e))
            if isinstance(binding, StaticCall):
                args = [self._eval(a, env, this, cid, origin) for a in e.args]
                minfo = self.program.symbols[binding.owner].methods[binding.sig]
                return self._invoke_static(binding.owner, minfo, args, cid, site)
            if isinstance(binding, VirtualCall):
                recv = self._eval(e.recv, env, this, cid, origin)
                if not isinstance(recv, Obj):
                    raise RuntimeTypeError("instance call on a non-object")
                args = [self._eval(a, env, this, cid, origin) for a in e.args]
                return self._invoke_virtual(recv, binding.sig, args, cid, site)
            raise RuntimeTypeError("unresolved call at %s" % site)
        raise RuntimeTypeError("unknown expression %r" % (e,))

    def _binary(self, op, left, right):
        if op in ("+", "-", "*", "/", "<", ">"):
            if isinstance(left, bool) or isinstance(right, bool) \
                    or not isinstance(left, int) or not isinstance(right, int):
                raise RuntimeTypeError("operator %s requires int operands" % op)
            if op == "+":
                return left + right
            if op == "-":
                return left - right
            if op == "*":
                return left * right
            if op == "/":
                if right == 0:
                    raise DivisionByZero("division by zero")
                q = abs(left) // abs(right)  # truncate toward zero
                return q if (left < 0) == (right < 0) else -q
            return left < right if op == "<" else left > right
        if op == "==":
            return self._same(left, right)
        if op == "!=":
            return not self._same(left, right)
        raise RuntimeTypeError("unknown operator %s" % op)

    def _same(self, left, right):
        if isinstance(left, Obj) or isinstance(right, Obj):
            return left is right
        return left == right

    def _resolve_reflect(self, target: str, nargs: int):
        """Resolve a reflective target name to a static method.

        Accepts the full construct name with parameter list, or a dotted name
        disambiguated by argument count."""
        if "(" in target:
            owner, sig = _split_member(target)
            info = self.program.symbols.get(owner)
            m = info.methods.get(sig) if info else None
            if m is None or not m.static:
                raise UnknownReflectTarget(target)
            return owner, m
        owner, name = target.rsplit(".", 1) if "." in target else (None, target)
        if owner is None or owner not in self.program.symbols:
            raise UnknownReflectTarget(target)
        candidates = [m for m in self.program.symbols[owner].methods.values()
                      if m.static and m.decl.name == name and len(m.param_types) == nargs]
        if len(candidates) != 1:
            raise UnknownReflectTarget("%s (%d candidate(s))" % (target, len(candidates)))
        return owner, candidates[0]


def _split_member(qname: str) -> tuple:
    head = qname.split("(", 1)[0]
    owner, name = head.rsplit(".", 1)
    sig = name + "(" + qname.split("(", 1)[1] if "(" in qname else name + "()"
    return owner, sig


def run_entry(program: ResolvedProgram, entry: ConstructId, args=None,
              test_name: str = "", step_budget: int = DEFAULT_STEP_BUDGET) -> RunResult:
    return Interpreter(program, step_budget).run_entry(entry, args, test_name)


def find_tests(bom, program: ResolvedProgram, pattern: str = "test") -> list:
    """Zero-argument static application methods whose simple name starts with
    the pattern, in qname order."""
    out = []
    for cid in sorted(bom.application.constructs):
        if cid.ctype != METHOD or not cid.qname.endswith("()"):
            continue
        owner, sig = _split_member(cid.qname)
        info = program.symbols.get(owner)
        m = info.methods.get(sig) if info else None
        if m is None or not m.static:
            continue
        if m.decl.name.startswith(pattern):
            out.append(cid)
    return out


def run_tests(bom, program: ResolvedProgram, pattern: str = "test",
              step_budget: int = DEFAULT_STEP_BUDGET) -> tuple:
    """Run each matching test in isolation on a fresh heap; failing tests keep
    their partial traces. Returns (TraceLog, {test qname: error})."""
    tests = find_tests(bom, program, pattern)
    if not tests:
        raise NoTestsMatched("no static test method matches pattern %r" % pattern)
    log = TraceLog()
    failures = {}
    for cid in tests:
        result = Interpreter(program, step_budget).run_entry(cid, [], cid.qname)
        log = log.merge(result.log)
        if result.error is not None:
            failures[cid.qname] = result.error
    return log, failures
