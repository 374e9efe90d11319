"""Scope checking and lowering of the surface AST onto the CPS builder."""

from __future__ import annotations

from enum import Enum

from .. import cps, lang
from ..cps import Comp
from ..term import Term
from .ast import (
    Assert,
    Assign,
    BinOp,
    BoolLit,
    Call,
    CallUnit,
    DefDecl,
    Expr,
    If,
    IfStmt,
    IntLit,
    Lambda,
    ListLit,
    NotOp,
    Pos,
    Seq,
    UnitLit,
    ValDecl,
    VarRef,
    While,
)

# parameter name for `def f () = ...`; not a valid surface name
UNIT_PARAM = "_"


class ScopeErrorKind(Enum):
    NOT_ASSIGNABLE = "NotAssignable"
    UNBOUND = "Unbound"
    RESERVED_NAME = "ReservedName"
    # the language has no mutable cells, so nothing raises this
    MUTABLE_CELL = "MutableCell"


class ScopeError(Exception):
    def __init__(self, kind: ScopeErrorKind, name: str, pos: Pos) -> None:
        if kind is ScopeErrorKind.NOT_ASSIGNABLE:
            detail = f"{name} cannot be assigned here."
        elif kind is ScopeErrorKind.UNBOUND:
            detail = f"{name} is not bound."
        else:
            detail = f"{name} is reserved."
        super().__init__(f"{pos[0]}:{pos[1]}: {detail}")
        self.kind = kind
        self.name = name
        self.pos = pos
        self.detail = detail


class UnsupportedFeature(Exception):
    def __init__(self, pos: Pos, what: str) -> None:
        super().__init__(f"{pos[0]}:{pos[1]}: {what}")
        self.pos = pos
        self.detail = what


# -- scope checking ----------------------------------------------------------------
# env maps each visible name to the function nesting level that bound it; a name
# is assignable only at the level that bound it.


def _bind(env: dict[str, int], name: str, level: int, pos: Pos) -> None:
    if name in lang.RESERVED:
        raise ScopeError(ScopeErrorKind.RESERVED_NAME, name, pos)
    env[name] = level


def _check_block(seq: Seq, env: dict[str, int], level: int) -> None:
    env = dict(env)
    for s in seq.stmts:
        match s:
            case ValDecl(name, rhs, pos):
                _check_expr(rhs, env, level)
                _bind(env, name, level, pos)
            case DefDecl(name, param, body, pos):
                inner = dict(env)
                _bind(inner, param or UNIT_PARAM, level + 1, pos)
                _check_block(body, inner, level + 1)
                _bind(env, name, level, pos)
            case Assign(name, rhs, pos):
                if name in lang.RESERVED:
                    raise ScopeError(ScopeErrorKind.RESERVED_NAME, name, pos)
                if env.get(name) != level:
                    raise ScopeError(ScopeErrorKind.NOT_ASSIGNABLE, name, pos)
                _check_expr(rhs, env, level)
            case IfStmt(c, then, else_):
                _check_expr(If(c, then, else_), env, level)
            case While(c, body):
                _check_expr(c, env, level)
                _check_block(body, env, level)
            case Assert(c):
                _check_expr(c, env, level)
    if seq.result is not None:
        _check_expr(seq.result, env, level)


def _check_expr(e: Expr, env: dict[str, int], level: int) -> None:
    match e:
        case VarRef(name, pos):
            if name in lang.RESERVED:
                raise ScopeError(ScopeErrorKind.RESERVED_NAME, name, pos)
            if name not in env:
                raise ScopeError(ScopeErrorKind.UNBOUND, name, pos)
        case Lambda(param, body, pos):
            inner = dict(env)
            _bind(inner, param, level + 1, pos)
            _check_block(body, inner, level + 1)
        case Call(fn, arg):
            _check_expr(fn, env, level)
            _check_expr(arg, env, level)
        case CallUnit(fn):
            _check_expr(fn, env, level)
        case BinOp(_, left, right):
            _check_expr(left, env, level)
            _check_expr(right, env, level)
        case NotOp(operand):
            _check_expr(operand, env, level)
        case If(c, then, else_):
            _check_expr(c, env, level)
            _check_block(then, env, level)
            if else_ is not None:
                _check_block(else_, env, level)
        case Seq():
            _check_block(e, env, level)
        case ListLit(items):
            for item in items:
                _check_expr(item, env, level)


def check_scopes(program: Seq) -> None:
    """Enforce binding rules: no unbound or reserved names, and assignments only
    to variables bound inside the nearest enclosing function."""
    _check_block(program, {}, 0)


# -- lowering ------------------------------------------------------------------------

_BINOPS = {"==": lang.eq, ">": lang.gq, "-": lang.sub, "+": lang.add}


def _lower_if_stmt(c: Expr, then: Seq, else_: Seq | None) -> Comp:
    return lang.cond_(
        lower_expr(c),
        lower_block(then, stmt=True),
        lower_block(else_, stmt=True) if else_ is not None else cps.nop,
    )


def lower_block(seq: Seq, stmt: bool = False) -> Comp:
    """Lower a block.  With ``stmt`` set, its value is unused and a trailing
    ``if`` becomes a conditional statement."""

    def rest(i: int) -> Comp:
        if i == len(seq.stmts):
            if seq.result is None:
                return "unit"
            if stmt and isinstance(seq.result, If):
                r = seq.result
                return cps.seq(_lower_if_stmt(r.cond, r.then, r.else_), "unit")
            return lower_expr(seq.result)
        match seq.stmts[i]:
            case ValDecl(name, rhs):
                return cps.val(name, lower_expr(rhs), rest(i + 1))
            case DefDecl(name, param, body):
                fn = cps.abs_(param or UNIT_PARAM, lower_block(body))
                return cps.val(name, fn, rest(i + 1))
            case Assign(name, rhs):
                return cps.seq(cps.assign(name, lower_expr(rhs)), rest(i + 1))
            case IfStmt(c, then, else_):
                return cps.seq(_lower_if_stmt(c, then, else_), rest(i + 1))
            case While(c, body):
                return cps.seq(lang.while_(lower_expr(c), lower_block(body, stmt=True)), rest(i + 1))
            case Assert(c):
                return cps.seq(lang.assert_(lower_expr(c)), rest(i + 1))
        raise TypeError(f"not a statement: {seq.stmts[i]!r}")

    return rest(0)


def lower_expr(e: Expr) -> Comp:
    match e:
        case IntLit(n):
            return str(n)
        case BoolLit(b):
            return "true" if b else "false"
        case UnitLit():
            return "unit"
        case VarRef(name):
            return name
        case Lambda(param, body):
            return cps.abs_(param, lower_block(body))
        case CallUnit(fn):
            return cps.app(lower_expr(fn), "unit")
        case Call(fn, arg):
            return cps.app(lower_expr(fn), lower_expr(arg))
        case BinOp(op, left, right):
            return _BINOPS[op](lower_expr(left), lower_expr(right))
        case NotOp(operand):
            return lang.not_(lower_expr(operand))
        case If(c, then, else_):
            return lang.cond(
                lower_expr(c),
                lower_block(then),
                lower_block(else_) if else_ is not None else "unit",
            )
        case Seq():
            return lower_block(e)
        case ListLit(_, pos):
            raise UnsupportedFeature(pos, "lists are not supported")
    raise TypeError(f"not an expression: {e!r}")


def elaborate(program: Seq, *, eval_order: str = "ltr") -> Term:
    """Scope-check ``program`` and compile it to a closed, hole-free term."""
    check_scopes(program)
    comp = lower_block(program)
    try:
        return cps.build(comp, eval_order=eval_order)
    except cps.NotAssignable as e:
        # check_scopes should have caught this first
        raise ScopeError(ScopeErrorKind.NOT_ASSIGNABLE, e.name, program.pos) from e
