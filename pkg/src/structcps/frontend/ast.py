"""Surface syntax tree.  Every node carries its 1-based (line, column)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Pos = tuple[int, int]


def _pos() -> Pos:
    return field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class IntLit:
    value: int
    pos: Pos = _pos()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    pos: Pos = _pos()


@dataclass(frozen=True)
class UnitLit:
    pos: Pos = _pos()


@dataclass(frozen=True)
class VarRef:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Lambda:
    param: str
    body: Seq
    pos: Pos = _pos()


@dataclass(frozen=True)
class CallUnit:
    fn: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class Call:
    fn: Expr
    arg: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class BinOp:
    op: str  # one of == > - +
    left: Expr
    right: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class NotOp:
    operand: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Seq
    else_: Optional[Seq]
    pos: Pos = _pos()


@dataclass(frozen=True)
class ListLit:
    """Parsed only so it can be rejected with a clear error."""

    items: tuple[Expr, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class Seq:
    """Statements followed by a result expression (None means unit)."""

    stmts: tuple[Stmt, ...]
    result: Optional[Expr]
    pos: Pos = _pos()


@dataclass(frozen=True)
class ValDecl:
    name: str
    rhs: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class DefDecl:
    """``def f (x) = e``; ``param`` is None for ``def f () = e``."""

    name: str
    param: Optional[str]
    body: Seq
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assign:
    name: str
    rhs: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class IfStmt:
    cond: Expr
    then: Seq
    else_: Optional[Seq]
    pos: Pos = _pos()


@dataclass(frozen=True)
class While:
    cond: Expr
    body: Seq
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assert:
    cond: Expr
    pos: Pos = _pos()


Expr = Union[IntLit, BoolLit, UnitLit, VarRef, Lambda, CallUnit, Call, BinOp, NotOp, If, ListLit, Seq]
Stmt = Union[ValDecl, DefDecl, Assign, IfStmt, While, Assert]
STMT_TYPES = (ValDecl, DefDecl, Assign, IfStmt, While, Assert)
