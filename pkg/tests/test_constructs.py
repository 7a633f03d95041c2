"""Construct extraction, fingerprints, and version ordering."""

import random

from helpers import random_program
from vulnvet.constructs import (CLASS, CONSTRUCTOR, INTERFACE, METHOD,
                                PACKAGE, ConstructId, extract_constructs,
                                version_key, version_newer)
from vulnvet.jx import parse_unit, resolve


def _extract(src, origin="u.jx"):
    return extract_constructs(resolve([parse_unit(src, origin)]))


def test_minimal_class_enumeration():
    cons = _extract("package p; class A { void m() { } }")
    assert set(cons) == {
        ConstructId(PACKAGE, "p"),
        ConstructId(CLASS, "p.A"),
        ConstructId(CONSTRUCTOR, "p.A.A()"),
        ConstructId(METHOD, "p.A.m()"),
    }


def test_interface_signatures_become_method_constructs():
    cons = _extract("package p; interface I { int f(int a); text g(); }")
    assert ConstructId(INTERFACE, "p.I") in cons
    assert ConstructId(METHOD, "p.I.f(int)") in cons
    assert ConstructId(METHOD, "p.I.g()") in cons
    # no constructor for interfaces
    assert not any(c.ctype == CONSTRUCTOR for c in cons)


def test_declared_constructor_suppresses_default():
    cons = _extract("package p; class A { A(int n) { } }")
    ctors = [c for c in cons if c.ctype == CONSTRUCTOR]
    assert [c.qname for c in ctors] == ["p.A.A(int)"]


def test_param_types_are_resolved_in_qnames():
    src = "package p; class A { } class B { void m(A a, int k) { } }"
    cons = _extract(src)
    assert ConstructId(METHOD, "p.B.m(p.A,int)") in cons


def test_package_construct_has_no_body():
    cons = _extract("package p; class A { }")
    pkg = cons[ConstructId(PACKAGE, "p")]
    assert pkg.body is None and pkg.fingerprint is None


def test_fingerprint_ignores_whitespace_and_comments():
    a = _extract("package p; class A { int m() { return 1+2; } }")
    b = _extract("package p; class A { int m() {\n  // note\n  return 1 + 2 ;\n} }")
    mid = ConstructId(METHOD, "p.A.m()")
    assert a[mid].fingerprint == b[mid].fingerprint


def test_fingerprint_is_literal_sensitive():
    a = _extract("package p; class A { int m() { return 1; } }")
    b = _extract("package p; class A { int m() { return 2; } }")
    mid = ConstructId(METHOD, "p.A.m()")
    assert a[mid].fingerprint != b[mid].fingerprint


def test_class_fingerprint_elides_member_bodies():
    a = _extract("package p; class A { int m() { return 1; } }")
    b = _extract("package p; class A { int m() { return 2; } }")
    ccls = ConstructId(CLASS, "p.A")
    assert a[ccls].fingerprint == b[ccls].fingerprint
    # a signature change does alter the class fingerprint
    c = _extract("package p; class A { int m(int k) { return 1; } }")
    assert a[ccls].fingerprint != c[ccls].fingerprint


def test_declaration_count_oracle():
    rng = random.Random(8)
    for _ in range(30):
        model = random_program(rng, n_classes=3, n_methods=4)
        cons = _extract(model.render())
        methods = sum(len(ms) for ms in model.classes.values())
        classes = len(model.classes)
        # one package + one class, one synthesized ctor, and every method
        assert len(cons) == 1 + classes * 2 + methods


def test_version_ordering():
    assert version_key("1.2") == version_key("1.2.0")
    assert version_newer("1.10", "1.9")
    assert version_newer("2.0", "1.99.99")
    assert not version_newer("1.2", "1.2.0")
    versions = ["2.0", "1.10", "1.2", "1.9.1"]
    assert sorted(versions, key=version_key) == ["1.2", "1.9.1", "1.10", "2.0"]
