"""Direct big-step interpreter for the surface AST.

Used only as a differential-testing oracle for the CPS pipeline.  It shares
nothing with the builder: environments are dictionaries of immutable values,
an assignment rebinds a name, and closures snapshot the environment they were
created in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from ..lang import UNIT, Unit
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
    Seq,
    UnitLit,
    ValDecl,
    VarRef,
    While,
)
from .elaborate import UNIT_PARAM

DEFAULT_FUEL = 1_000_000


class InterpError(Exception):
    pass


class AssertionFailed(InterpError):
    pass


class FuelExhausted(InterpError):
    pass


class RuntimeTypeError(InterpError):
    pass


@dataclass(frozen=True, eq=False)
class RefClosure:
    param: str
    body: Seq
    env: dict

    def __str__(self) -> str:
        return "<closure>"


RefValue = Union[int, bool, Unit, RefClosure]
Env = dict[str, RefValue]
_ABSENT = object()


class _Interpreter:
    def __init__(self, fuel: int) -> None:
        self.fuel = fuel

    def tick(self) -> None:
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhausted("out of fuel")

    def block(self, seq: Seq, env: Env) -> tuple[RefValue, Env]:
        """Run a block; the returned env carries assignments to outer names."""
        local = dict(env)
        # outer value of each name this block shadows, taken at first declaration
        shadowed: dict[str, object] = {}

        def declare(name: str, value: RefValue) -> None:
            if name not in shadowed:
                shadowed[name] = local.get(name, _ABSENT)
            local[name] = value

        for s in seq.stmts:
            match s:
                case ValDecl(name, rhs):
                    v, local = self.expr(rhs, local)
                    declare(name, v)
                case DefDecl(name, param, body):
                    declare(name, RefClosure(param or UNIT_PARAM, body, dict(local)))
                case Assign(name, rhs):
                    v, local = self.expr(rhs, local)
                    local[name] = v
                case IfStmt(c, then, else_):
                    _, local = self.expr(If(c, then, else_), local)
                case While(c, body):
                    while True:
                        self.tick()
                        test, local = self.expr(c, local)
                        if not self.truth(test):
                            break
                        _, local = self.block(body, local)
                case Assert(c):
                    v, local = self.expr(c, local)
                    if not self.truth(v):
                        raise AssertionFailed("assertion failed")
        result: RefValue = UNIT
        if seq.result is not None:
            result, local = self.expr(seq.result, local)
        out = {}
        for name, v in local.items():
            old = shadowed.get(name, v)
            if old is not _ABSENT:
                out[name] = old
        return result, out

    def truth(self, v: RefValue) -> bool:
        if not isinstance(v, bool):
            raise RuntimeTypeError(f"expected a boolean, got {v!r}")
        return v

    def integer(self, v: RefValue) -> int:
        if isinstance(v, bool) or not isinstance(v, int):
            raise RuntimeTypeError(f"expected an integer, got {v!r}")
        return v

    def call(self, fn: RefValue, arg: RefValue) -> RefValue:
        if not isinstance(fn, RefClosure):
            raise RuntimeTypeError(f"cannot call {fn!r}")
        self.tick()
        v, _ = self.block(fn.body, {**fn.env, fn.param: arg})
        return v

    def expr(self, e: Expr, env: Env) -> tuple[RefValue, Env]:
        match e:
            case IntLit(n):
                return n, env
            case BoolLit(b):
                return b, env
            case UnitLit():
                return UNIT, env
            case VarRef(name):
                return env[name], env
            case Lambda(param, body):
                return RefClosure(param, body, dict(env)), env
            case CallUnit(fn):
                f, env = self.expr(fn, env)
                return self.call(f, UNIT), env
            case Call(fn, arg):
                f, env = self.expr(fn, env)
                a, env = self.expr(arg, env)
                return self.call(f, a), env
            case BinOp(op, left, right):
                a, env = self.expr(left, env)
                b, env = self.expr(right, env)
                if op == "==":
                    if type(a) is not type(b) or not isinstance(a, (int, bool)):
                        raise RuntimeTypeError(f"cannot compare {a!r} and {b!r}")
                    return a == b, env
                x, y = self.integer(a), self.integer(b)
                return {">": x > y, "-": x - y, "+": x + y}[op], env
            case NotOp(operand):
                v, env = self.expr(operand, env)
                return not self.truth(v), env
            case If(c, then, else_):
                test, env = self.expr(c, env)
                if self.truth(test):
                    return self.block(then, env)
                if else_ is None:
                    return UNIT, env
                return self.block(else_, env)
            case Seq():
                return self.block(e, env)
            case ListLit():
                raise InterpError("lists are not supported")
        raise TypeError(f"not an expression: {e!r}")


def interpret(program: Seq, args: Iterable[int | bool] = (), fuel: int = DEFAULT_FUEL) -> RefValue:
    """Run ``program`` and apply its value to ``args`` one at a time."""
    interp = _Interpreter(fuel)
    value, _ = interp.block(program, {})
    for a in args:
        value = interp.call(value, a)
    return value
