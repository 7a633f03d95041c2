"""Recursive-descent parser for JX.

Grammar:
    unit      := "package" qname ";" {typedecl}
    typedecl  := "class" ID ["extends" qname] ["implements" qname {"," qname}]
                 "{" {member} "}"
               | "interface" ID "{" {methodsig ";"} "}"
    member    := field | ctor | method
    method    := ["static"] type ID "(" params ")" block
    ctor      := ID "(" params ")" block            -- ID = class name
    field     := type ID ["=" expr] ";"
    type      := "int" | "boolean" | "text" | "void" | qname

Statements: block, local decl, assignment, expression, if/else, while, return.
Expressions: literals, variable, field access, this, new, instance/static call,
binary + - * / == != < >, and Reflect.invoke(target, args...).

The parser does not distinguish static calls from instance calls on a field
chain; `a.b.c(x)` is parsed as a method call whose receiver is a name chain,
and the resolver decides whether the prefix names a type.
"""

from __future__ import annotations

from . import ast
from .errors import ParseError
from .lexer import Token, tokenize


class _Parser:
    def __init__(self, tokens, origin):
        self.tokens = tokens
        self.origin = origin
        self.i = 0

    # --- token plumbing ---

    def peek(self, offset=0) -> Token:
        j = min(self.i + offset, len(self.tokens) - 1)
        return self.tokens[j]

    def at(self, kind) -> bool:
        return self.peek().kind == kind

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def expect(self, kind) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail("expected %s, found %r" % (kind, tok.value or "end of input"))
        return self.advance()

    def fail(self, msg):
        tok = self.peek()
        raise ParseError(msg, tok.line, tok.col, self.origin)

    def pos(self):
        tok = self.peek()
        return (tok.line, tok.col)

    # --- declarations ---

    def unit(self) -> ast.SourceUnit:
        self.expect("package")
        pkg = ".".join(self.qname())
        self.expect(";")
        unit = ast.SourceUnit(origin=self.origin, package=pkg)
        while not self.at("EOF"):
            unit.decls.append(self.typedecl())
        seen = set()
        for d in unit.decls:
            if d.name in seen:
                raise ParseError("duplicate type %s in unit" % d.name, d.pos[0], d.pos[1], self.origin)
            seen.add(d.name)
        return unit

    def qname(self) -> tuple:
        parts = [self.expect("ID").value]
        while self.at(".") and self.peek(1).kind == "ID":
            self.advance()
            parts.append(self.expect("ID").value)
        return tuple(parts)

    def typedecl(self):
        if self.at("class"):
            return self.classdecl()
        if self.at("interface"):
            return self.interfacedecl()
        self.fail("expected class or interface")

    def classdecl(self) -> ast.ClassDecl:
        pos = self.pos()
        self.expect("class")
        name = self.expect("ID").value
        extends = None
        implements = []
        if self.at("extends"):
            self.advance()
            extends = ast.NamedType(self.qname())
        if self.at("implements"):
            self.advance()
            implements.append(ast.NamedType(self.qname()))
            while self.at(","):
                self.advance()
                implements.append(ast.NamedType(self.qname()))
        self.expect("{")
        decl = ast.ClassDecl(name, extends, implements, [], [], [], pos)
        while not self.at("}"):
            self.member(decl)
        self.expect("}")
        return decl

    def interfacedecl(self) -> ast.InterfaceDecl:
        pos = self.pos()
        self.expect("interface")
        name = self.expect("ID").value
        self.expect("{")
        methods = []
        while not self.at("}"):
            mpos = self.pos()
            rettype = self.type_()
            mname = self.expect("ID").value
            params = self.params()
            self.expect(";")
            methods.append(ast.MethodDecl(False, rettype, mname, params, None, mpos))
        self.expect("}")
        return ast.InterfaceDecl(name, methods, pos)

    def member(self, decl: ast.ClassDecl):
        pos = self.pos()
        if self.at("static"):
            self.advance()
            rettype = self.type_()
            name = self.expect("ID").value
            params = self.params()
            body = self.block()
            decl.methods.append(ast.MethodDecl(True, rettype, name, params, body, pos))
            return
        # constructor: class-name "("
        if self.at("ID") and self.peek().value == decl.name and self.peek(1).kind == "(":
            name = self.advance().value
            params = self.params()
            body = self.block()
            decl.ctors.append(ast.CtorDecl(name, params, body, pos))
            return
        rettype = self.type_()
        name = self.expect("ID").value
        if self.at("("):
            params = self.params()
            body = self.block()
            decl.methods.append(ast.MethodDecl(False, rettype, name, params, body, pos))
        else:
            init = None
            if self.at("="):
                self.advance()
                init = self.expr()
            self.expect(";")
            decl.fields.append(ast.FieldDecl(rettype, name, init, pos))

    def params(self) -> list:
        self.expect("(")
        out = []
        if not self.at(")"):
            out.append(self.param())
            while self.at(","):
                self.advance()
                out.append(self.param())
        self.expect(")")
        return out

    def param(self) -> ast.Param:
        t = self.type_()
        name = self.expect("ID").value
        return ast.Param(t, name)

    def type_(self):
        tok = self.peek()
        if tok.kind in ast.PRIMITIVES:
            self.advance()
            return ast.PrimType(tok.kind)
        if tok.kind == "ID":
            return ast.NamedType(self.qname())
        self.fail("expected a type")

    # --- statements ---

    def block(self) -> ast.Block:
        pos = self.pos()
        self.expect("{")
        stmts = []
        while not self.at("}"):
            stmts.append(self.stmt())
        self.expect("}")
        return ast.Block(stmts, pos)

    def stmt(self):
        pos = self.pos()
        kind = self.peek().kind
        if kind == "{":
            return self.block()
        if kind == "if":
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.stmt()
            els = None
            if self.at("else"):
                self.advance()
                els = self.stmt()
            return ast.If(cond, then, els, pos)
        if kind == "while":
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            body = self.stmt()
            return ast.While(cond, body, pos)
        if kind == "return":
            self.advance()
            value = None
            if not self.at(";"):
                value = self.expr()
            self.expect(";")
            return ast.Return(value, pos)
        decl = self.try_local_decl()
        if decl is not None:
            return decl
        expr = self.expr()
        if self.at("="):
            if not isinstance(expr, (ast.Var, ast.FieldAccess)):
                self.fail("assignment target must be a variable or field")
            self.advance()
            value = self.expr()
            self.expect(";")
            return ast.Assign(expr, value, pos)
        self.expect(";")
        return ast.ExprStmt(expr, pos)

    def try_local_decl(self):
        """Speculatively parse `type ID ["=" expr] ";"`; backtrack on mismatch."""
        kind = self.peek().kind
        if kind not in ("int", "boolean", "text", "ID"):
            return None
        mark = self.i
        pos = self.pos()
        try:
            t = self.type_()
            if not self.at("ID"):
                raise ParseError("not a declaration", 0, 0)
            name = self.advance().value
            if self.at("="):
                self.advance()
                init = self.expr()
                self.expect(";")
                return ast.LocalDecl(t, name, init, pos)
            if self.at(";"):
                self.advance()
                return ast.LocalDecl(t, name, None, pos)
            raise ParseError("not a declaration", 0, 0)
        except ParseError:
            self.i = mark
            return None

    # --- expressions (precedence climbing) ---

    def expr(self):
        return self.equality()

    def equality(self):
        left = self.relational()
        while self.peek().kind in ("==", "!="):
            pos = self.pos()
            op = self.advance().kind
            left = ast.Binary(op, left, self.relational(), pos)
        return left

    def relational(self):
        left = self.additive()
        while self.peek().kind in ("<", ">"):
            pos = self.pos()
            op = self.advance().kind
            left = ast.Binary(op, left, self.additive(), pos)
        return left

    def additive(self):
        left = self.multiplicative()
        while self.peek().kind in ("+", "-"):
            pos = self.pos()
            op = self.advance().kind
            left = ast.Binary(op, left, self.multiplicative(), pos)
        return left

    def multiplicative(self):
        left = self.postfix()
        while self.peek().kind in ("*", "/"):
            pos = self.pos()
            op = self.advance().kind
            left = ast.Binary(op, left, self.postfix(), pos)
        return left

    def postfix(self):
        expr = self.primary()
        while self.at(".") and self.peek(1).kind == "ID":
            pos = self.pos()
            self.advance()
            name = self.expect("ID").value
            if self.at("("):
                args = self.args()
                if isinstance(expr, ast.Var) and expr.name == "Reflect" and name == "invoke":
                    if not args:
                        self.fail("Reflect.invoke requires a target argument")
                    expr = ast.ReflectInvoke(args, pos)
                else:
                    expr = ast.MethodCall(expr, name, args, pos)
            else:
                expr = ast.FieldAccess(expr, name, pos)
        return expr

    def primary(self):
        tok = self.peek()
        pos = self.pos()
        if tok.kind == "INT":
            self.advance()
            return ast.IntLit(int(tok.value), pos)
        if tok.kind == "TEXT":
            self.advance()
            return ast.TextLit(tok.value, pos)
        if tok.kind in ("true", "false"):
            self.advance()
            return ast.BoolLit(tok.kind == "true", pos)
        if tok.kind == "this":
            self.advance()
            return ast.This(pos)
        if tok.kind == "new":
            self.advance()
            t = ast.NamedType(self.qname())
            args = self.args()
            return ast.New(t, args, pos)
        if tok.kind == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.kind == "ID":
            self.advance()
            return ast.Var(tok.value, pos)
        self.fail("expected an expression, found %r" % (tok.value or "end of input"))

    def args(self) -> list:
        self.expect("(")
        out = []
        if not self.at(")"):
            out.append(self.expr())
            while self.at(","):
                self.advance()
                out.append(self.expr())
        self.expect(")")
        return out


def parse_unit(source: str, origin: str = "<source>") -> ast.SourceUnit:
    """Parse one JX compilation unit; raises ParseError with line/column."""
    return _Parser(tokenize(source, origin), origin).unit()
