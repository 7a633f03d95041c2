"""Tracing interpreter semantics."""

import pytest

from vulnvet.bom import APPLICATION, Archive, BOM
from vulnvet.constructs import METHOD, ConstructId, extract_constructs
from vulnvet.errors import NoTestsMatched
from vulnvet.interp import find_tests, run_entry, run_tests
from vulnvet.jx import parse_unit, resolve


def _program(src):
    program = resolve([parse_unit(src, "u.jx")])
    program.require_clean()
    return program


def _run(src, entry, args=None):
    return run_entry(_program(src), ConstructId(METHOD, entry), args or [])


def _eval(body, decls="") -> object:
    src = "package p; %s class M { static int go() { %s } }" % (decls, body)
    result = _run(src, "p.M.go()")
    assert result.error is None, result.error
    return result.value


def test_arithmetic_and_comparison():
    assert _eval("return 2 + 3 * 4;") == 14
    assert _eval("return (2 + 3) * 4;") == 20
    assert _eval("return 7 - 10;") == -3


def test_division_truncates_toward_zero():
    assert _eval("return 7 / 2;") == 3
    assert _eval("return 0 - 7 / 2;") == -3
    assert _eval("return (0 - 7) / 2;") == -3


def test_division_by_zero():
    src = "package p; class M { static int go() { return 1 / 0; } }"
    result = _run(src, "p.M.go()")
    assert result.error.startswith("DivisionByZero")


def test_while_loop_mutates_outer_scope():
    assert _eval("""
        int i;
        int acc;
        i = 0;
        acc = 0;
        while (i < 5) {
            acc = acc + i;
            i = i + 1;
        }
        return acc;
    """) == 10


def test_objects_fields_and_virtual_dispatch():
    src = """
package p;
class Base {
    int v;
    Base() { this.v = 1; }
    int get() { return this.v; }
}
class Derived extends Base {
    Derived() { this.v = 2; }
    int get() { return this.v * 10; }
}
class M {
    static int go() {
        Base b;
        b = new Derived();
        return b.get();
    }
}
"""
    result = _run(src, "p.M.go()")
    assert result.value == 20


def test_field_initializers_run_before_ctor_body():
    src = """
package p;
class A {
    int v = 5;
    A() { this.v = this.v + 1; }
    int get() { return this.v; }
}
class M { static int go() { return new A().get(); } }
"""
    assert _run(src, "p.M.go()").value == 6


def test_reflect_invoke_by_dotted_name():
    src = """
package p;
class T { static int hit(int n) { return n + 100; } }
class M { static void go() { Reflect.invoke("p.T.hit", 1); } }
"""
    result = _run(src, "p.M.go()")
    assert result.error is None
    assert "p.T.hit(int)" in [e.callee.qname for e in result.log.events]


def test_reflect_invoke_by_full_signature():
    src = """
package p;
class T {
    static int f(int n) { return 1; }
    static int f(text s) { return 2; }
}
class M { static void go() { Reflect.invoke("p.T.f(text)", "x"); } }
"""
    result = _run(src, "p.M.go()")
    assert result.error is None
    callees = [e.callee.qname for e in result.log.events]
    assert "p.T.f(text)" in callees and "p.T.f(int)" not in callees


def test_reflect_unknown_target():
    src = 'package p; class M { static void go() { Reflect.invoke("p.Gone.x"); } }'
    result = _run(src, "p.M.go()")
    assert result.error.startswith("UnknownReflectTarget")


def test_step_budget_stops_infinite_loop():
    src = "package p; class M { static void go() { while (true) { } } }"
    program = _program(src)
    result = run_entry(program, ConstructId(METHOD, "p.M.go()"), [],
                       step_budget=500)
    assert result.error.startswith("StepBudgetExceeded")


def test_trace_records_caller_and_site():
    src = """
package p;
class T { static int hit() { return 1; } }
class M { static int go() { return p.T.hit(); } }
"""
    result = _run(src, "p.M.go()")
    events = result.log.events
    assert [e.callee.qname for e in events] == ["p.M.go()", "p.T.hit()"]
    hit = events[1]
    assert hit.caller.qname == "p.M.go()"
    assert hit.site == "u.jx:4"


def test_failed_run_keeps_partial_trace():
    src = """
package p;
class T { static int boom() { return 1 / 0; } }
class M { static int go() { return p.T.boom(); } }
"""
    result = _run(src, "p.M.go()")
    assert result.error.startswith("DivisionByZero")
    assert [e.callee.qname for e in result.log.events] == [
        "p.M.go()", "p.T.boom()"]


def _bom_for(src):
    unit = parse_unit(src, "app.jx")
    program = resolve([unit])
    program.require_clean()
    app = Archive("a", "1.0", APPLICATION, None, units=[unit],
                  constructs=extract_constructs(program))
    return BOM(app, []), program


def test_find_and_run_tests():
    src = """
package p;
class M {
    static void testOne() { p.M.helper(); }
    static void testTwo() { }
    static int helper() { return 1; }
    static void other() { }
}
"""
    bom, program = _bom_for(src)
    tests = find_tests(bom, program, "test")
    assert [t.qname for t in tests] == ["p.M.testOne()", "p.M.testTwo()"]
    log, failures = run_tests(bom, program, "test")
    assert failures == {}
    assert {e.test for e in log.events} == {"p.M.testOne()", "p.M.testTwo()"}
    with pytest.raises(NoTestsMatched):
        run_tests(bom, program, "nothing")


def test_call_through_unassigned_field_is_a_runtime_error():
    src = """
package p;
class A { int get() { return 1; } }
class Holder { A ref; }
class M {
    static int go() {
        Holder h;
        h = new Holder();
        return h.ref.get();
    }
}
"""
    result = _run(src, "p.M.go()")
    assert result.error.startswith("RuntimeTypeError")
