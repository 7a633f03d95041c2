"""Syntax tree for JX.

Nodes carry a (line, col) position for diagnostics and call-site provenance.
Comments and whitespace are discarded by the lexer and never reach the tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Pos = tuple  # (line, col)

PRIMITIVES = ("int", "boolean", "text", "void")


@dataclass(frozen=True)
class PrimType:
    name: str  # int | boolean | text | void

    def text(self) -> str:
        return self.name


@dataclass(frozen=True)
class NamedType:
    parts: tuple  # dotted name components

    def text(self) -> str:
        return ".".join(self.parts)


Type = Union[PrimType, NamedType]


@dataclass
class Param:
    type: Type
    name: str


# --- expressions -----------------------------------------------------------

@dataclass
class IntLit:
    value: int
    pos: Pos


@dataclass
class TextLit:
    value: str
    pos: Pos


@dataclass
class BoolLit:
    value: bool
    pos: Pos


@dataclass
class Var:
    name: str
    pos: Pos


@dataclass
class This:
    pos: Pos


@dataclass
class FieldAccess:
    obj: "Expr"
    name: str
    pos: Pos


@dataclass
class New:
    type: NamedType
    args: list
    pos: Pos


@dataclass
class MethodCall:
    recv: "Expr"  # receiver expression or dotted name chain (Var/FieldAccess)
    name: str
    args: list
    pos: Pos


@dataclass
class ReflectInvoke:
    args: list  # first arg is the target name expression
    pos: Pos


@dataclass
class Binary:
    op: str  # + - * / == != < >
    left: "Expr"
    right: "Expr"
    pos: Pos


Expr = Union[IntLit, TextLit, BoolLit, Var, This, FieldAccess, New, MethodCall,
             ReflectInvoke, Binary]


# --- statements ------------------------------------------------------------

@dataclass
class Block:
    stmts: list
    pos: Pos


@dataclass
class LocalDecl:
    type: Type
    name: str
    init: Optional[Expr]
    pos: Pos


@dataclass
class Assign:
    target: Expr  # Var or FieldAccess
    value: Expr
    pos: Pos


@dataclass
class ExprStmt:
    expr: Expr
    pos: Pos


@dataclass
class If:
    cond: Expr
    then: "Stmt"
    els: Optional["Stmt"]
    pos: Pos


@dataclass
class While:
    cond: Expr
    body: "Stmt"
    pos: Pos


@dataclass
class Return:
    value: Optional[Expr]
    pos: Pos


Stmt = Union[Block, LocalDecl, Assign, ExprStmt, If, While, Return]


# --- declarations ----------------------------------------------------------

@dataclass
class FieldDecl:
    type: Type
    name: str
    init: Optional[Expr]
    pos: Pos


@dataclass
class MethodDecl:
    static: bool
    rettype: Type
    name: str
    params: list
    body: Optional[Block]  # None for interface signatures
    pos: Pos


@dataclass
class CtorDecl:
    name: str  # equals the class simple name
    params: list
    body: Block
    pos: Pos
    synthetic: bool = False


@dataclass
class ClassDecl:
    name: str
    extends: Optional[NamedType]
    implements: list
    fields: list
    ctors: list
    methods: list
    pos: Pos


@dataclass
class InterfaceDecl:
    name: str
    methods: list  # MethodDecl with body=None
    pos: Pos


Decl = Union[ClassDecl, InterfaceDecl]


@dataclass
class SourceUnit:
    origin: str
    package: str
    decls: list = field(default_factory=list)
