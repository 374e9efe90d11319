"""Builtins, literals and derived control structures over the CPS builder."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .cps import Builder, Comp, ExitToken, bind, call_cc, call_cc_, loop, seq
from .term import Abs, FreeRef, Inter, apps, free, shift


class UnknownBuiltin(KeyError):
    def __init__(self, name: str) -> None:
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unknown builtin {self.name!r}"


class MalformedLiteral(ValueError):
    pass


@dataclass(frozen=True)
class BuiltinSig:
    name: str
    arity: int
    # if takes its three arguments and no continuation
    cps: bool = True


BUILTINS: dict[str, BuiltinSig] = {
    s.name: s
    for s in (
        BuiltinSig("eq", 2),
        BuiltinSig("gq", 2),
        BuiltinSig("sub", 2),
        BuiltinSig("add", 2),
        BuiltinSig("not", 1),
        BuiltinSig("if", 3, cps=False),
        BuiltinSig("assert", 1),
    )
}
LITERAL_NAMES = frozenset({"true", "false", "unit"})
RESERVED = frozenset(BUILTINS) | LITERAL_NAMES

_INT = re.compile(r"-?[0-9]+\Z")


class Unit:
    """The unit value."""

    _instance: "Unit | None" = None

    def __new__(cls) -> "Unit":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "()"


UNIT = Unit()


def is_literal(name: str) -> bool:
    return name in LITERAL_NAMES or bool(_INT.match(name))


def literal_value(name: str) -> int | bool | Unit:
    """Decode a literal free: canonical decimal integers, true, false, unit."""
    if name == "true":
        return True
    if name == "false":
        return False
    if name == "unit":
        return UNIT
    if _INT.match(name):
        n = int(name)
        if str(n) != name:
            raise MalformedLiteral(f"non-canonical integer literal {name!r}")
        return n
    raise MalformedLiteral(f"{name!r} is not a literal")


def literal_name(value: int | bool | Unit) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, Unit):
        return "unit"
    return str(value)


def prim(name: str, *args: Comp) -> Comp:
    """Call a CPS builtin: ``name a1 .. an (\\r. ...)``, returning ``r``."""
    sig = BUILTINS.get(name)
    if sig is None or not sig.cps:
        raise UnknownBuiltin(name)
    if len(args) != sig.arity:
        raise TypeError(f"{name} takes {sig.arity} arguments, got {len(args)}")

    def go(b: Builder) -> Inter:
        vals = [b.value(a) for a in args]
        r = b.fresh()
        b.nest(lambda inner: apps(free(name), *map(FreeRef, vals), bind(r, inner)))
        return r

    return go


def eq(a: Comp, b: Comp) -> Comp:
    return prim("eq", a, b)


def gq(a: Comp, b: Comp) -> Comp:
    return prim("gq", a, b)


def sub(a: Comp, b: Comp) -> Comp:
    return prim("sub", a, b)


def add(a: Comp, b: Comp) -> Comp:
    return prim("add", a, b)


def not_(a: Comp) -> Comp:
    return prim("not", a)


def assert_(a: Comp) -> Comp:
    return prim("assert", a)


def _if(b: Builder, c: Comp, then: Comp, else_: Comp) -> None:
    cv = b.value(c)
    t = b.run_block(then, "branch").body
    e = b.run_block(else_, "branch").body
    b.end(apps(free("if"), FreeRef(cv), Abs(shift(t, 1), "u"), Abs(shift(e, 1), "u")))


def cond(c: Comp, then: Comp, else_: Comp) -> Comp:
    """Conditional expression; both branches join through one value exit."""

    def branch(comp: Comp, join: Callable[[Comp], ExitToken]) -> Comp:
        def go(b: Builder) -> None:
            v = b.run(comp)
            if not b.terminated:
                b.run(join(b.value(v)))

        return go

    return call_cc(lambda join: lambda b: _if(b, c, branch(then, join), branch(else_, join)))


def cond_(c: Comp, then: Comp, else_: Comp) -> Comp:
    """Conditional statement; the join passes on only the merged assignments."""

    def branch(comp: Comp, join: ExitToken) -> Comp:
        def go(b: Builder) -> None:
            b.run(comp)
            if not b.terminated:
                join(b)

        return go

    return call_cc_(lambda join: lambda b: _if(b, c, branch(then, join), branch(else_, join)))


def while_(c: Comp, body: Comp) -> Comp:
    return call_cc_(lambda break_: loop(lambda cont: cond(c, seq(body, cont), break_)))


__all__ = [
    "BUILTINS",
    "BuiltinSig",
    "LITERAL_NAMES",
    "MalformedLiteral",
    "RESERVED",
    "UNIT",
    "Unit",
    "UnknownBuiltin",
    "add",
    "assert_",
    "cond",
    "cond_",
    "eq",
    "gq",
    "is_literal",
    "literal_name",
    "literal_value",
    "not_",
    "prim",
    "sub",
    "while_",
]
