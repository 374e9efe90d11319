"""Beta-eta normalization and a step-bounded call-by-value evaluator."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Union

from . import lang
from .term import (
    Abs,
    App,
    ExitHole,
    Fix,
    Free,
    FreeRef,
    Inter,
    Term,
    Var,
    apps,
    free,
    holes,
    instantiate,
    occurs,
    shift,
)

DEFAULT_MAX_STEPS = 1_000_000


class BudgetExceeded(Exception):
    def __init__(self, max_steps: int) -> None:
        super().__init__(f"step budget of {max_steps} exceeded")
        self.max_steps = max_steps


class HoleInTerm(ValueError):
    pass


class StuckReason(Enum):
    UNKNOWN_FREE = "UnknownFree"
    ARITY_MISMATCH = "ArityMismatch"
    TYPE_MISMATCH = "TypeMismatch"
    ASSERTION_FAILED = "AssertionFailed"
    MALFORMED_LITERAL = "MalformedLiteral"


class Stuck(Exception):
    def __init__(self, reason: StuckReason, detail: str = "") -> None:
        super().__init__(f"{reason.value}: {detail}" if detail else reason.value)
        self.reason = reason
        self.detail = detail


# -- normalization -----------------------------------------------------------------


class _Budget:
    def __init__(self, max_steps: int) -> None:
        if max_steps < 1:
            raise ValueError("max_steps must be positive")
        self.max_steps = max_steps
        self.used = 0

    def tick(self) -> None:
        self.used += 1
        if self.used > self.max_steps:
            raise BudgetExceeded(self.max_steps)


def _spine(t: Term) -> tuple[Term, list[Term]]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def _whnf(t: Term, budget: _Budget) -> Term:
    head, args = _spine(t)
    while isinstance(head, Abs) and args:
        budget.tick()
        head, more = _spine(instantiate(args[0], head.body))
        args = more + args[1:]
    return apps(head, *args)


def _beta_nf(t: Term, budget: _Budget) -> Term:
    # leftmost-outermost: reduce the head first, then the pieces left to right
    t = _whnf(t, budget)
    match t:
        case Abs(b, h):
            return Abs(_beta_nf(b, budget), h)
        case Fix(b, h):
            return Fix(_beta_nf(b, budget), h)
        case App():
            head, args = _spine(t)
            return apps(_beta_nf(head, budget), *(_beta_nf(a, budget) for a in args))
    return t


def _eta(t: Term, budget: _Budget) -> Term:
    match t:
        case Abs(b, h):
            b = _eta(b, budget)
            if isinstance(b, App) and b.arg == Var(0) and not occurs(b.fun, 0):
                budget.tick()
                return shift(b.fun, -1)
            return Abs(b, h)
        case Fix(b, h):
            return Fix(_eta(b, budget), h)
        case App(f, a):
            return App(_eta(f, budget), _eta(a, budget))
    return t


def beta_eta_normalize(t: Term, max_steps: int = DEFAULT_MAX_STEPS) -> Term:
    """Contract every beta and eta redex; ``Fix`` is never unfolded."""
    if holes(t):
        raise HoleInTerm("cannot normalize a term with unfilled exits")
    budget = _Budget(max_steps)
    t = _eta(_beta_nf(t, budget), budget)
    while True:
        again = _eta(_beta_nf(t, budget), budget)
        if again == t:
            return t
        t = again


def beta_redexes(t: Term) -> int:
    from .term import subterms

    return sum(1 for s in subterms(t) if isinstance(s, App) and isinstance(s.fun, Abs))


def eta_redexes(t: Term) -> int:
    from .term import subterms

    return sum(
        1
        for s in subterms(t)
        if isinstance(s, Abs)
        and isinstance(s.body, App)
        and s.body.arg == Var(0)
        and not occurs(s.body.fun, 0)
    )


# -- evaluation --------------------------------------------------------------------


@dataclass(frozen=True)
class IntV:
    n: int

    def __str__(self) -> str:
        return str(self.n)


@dataclass(frozen=True)
class BoolV:
    b: bool

    def __str__(self) -> str:
        return "true" if self.b else "false"


@dataclass(frozen=True)
class UnitV:
    def __str__(self) -> str:
        return "()"


@dataclass(frozen=True, eq=False)
class Closure:
    body: Term
    env: "Env"
    hint: str | None = None

    def __str__(self) -> str:
        return "<closure>"


@dataclass(frozen=True, eq=False)
class FixV:
    """A fixpoint awaiting application; unfolds one level per call."""

    body: Term
    env: "Env"

    def __str__(self) -> str:
        return "<closure>"


@dataclass(frozen=True)
class NeutralV:
    """A builtin applied to fewer arguments than it needs."""

    head: str
    spine: tuple["Value", ...] = ()

    def __str__(self) -> str:
        return f"<{self.head}/{len(self.spine)}>"


Value = Union[IntV, BoolV, UnitV, Closure, FixV, NeutralV]
# de Bruijn environment as a cons list: (innermost value, rest)
Env = Optional[tuple]


def _lookup(env: Env, depth: int) -> Value:
    for _ in range(depth):
        if env is None:
            break
        env = env[1]
    if env is None:
        raise Stuck(StuckReason.UNKNOWN_FREE, f"dangling index {depth}")
    return env[0]


def _free_value(v: Free | Inter) -> Value:
    if isinstance(v, Inter):
        raise Stuck(StuckReason.UNKNOWN_FREE, str(v))
    if v.name in lang.BUILTINS:
        return NeutralV(v.name)
    if lang.is_literal(v.name):
        try:
            x = lang.literal_value(v.name)
        except lang.MalformedLiteral as e:
            raise Stuck(StuckReason.MALFORMED_LITERAL, str(e)) from None
        return from_python(x)
    raise Stuck(StuckReason.UNKNOWN_FREE, v.name)


def from_python(x: int | bool | lang.Unit) -> Value:
    if isinstance(x, bool):
        return BoolV(x)
    if isinstance(x, lang.Unit):
        return UnitV()
    return IntV(x)


def _want(v: Value, kind: type, op: str) -> Value:
    if not isinstance(v, kind):
        raise Stuck(StuckReason.TYPE_MISMATCH, f"{op} expects {kind.__name__}, got {v}")
    return v


def _delta(name: str, args: tuple[Value, ...]) -> tuple[Value, Value]:
    """Fire a saturated builtin; returns (function to call, its argument)."""
    match name:
        case "eq":
            a, b, k = args
            if not (isinstance(a, (IntV, BoolV)) and type(a) is type(b)):
                raise Stuck(StuckReason.TYPE_MISMATCH, f"eq on {a} and {b}")
            return k, BoolV(a == b)
        case "gq":
            a, b, k = args
            return k, BoolV(_want(a, IntV, name).n > _want(b, IntV, name).n)
        case "sub":
            a, b, k = args
            return k, IntV(_want(a, IntV, name).n - _want(b, IntV, name).n)
        case "add":
            a, b, k = args
            return k, IntV(_want(a, IntV, name).n + _want(b, IntV, name).n)
        case "not":
            a, k = args
            return k, BoolV(not _want(a, BoolV, name).b)
        case "if":
            c, f, g = args
            return (f if _want(c, BoolV, name).b else g), UnitV()
        case "assert":
            c, k = args
            if not _want(c, BoolV, name).b:
                raise Stuck(StuckReason.ASSERTION_FAILED, "assertion failed")
            return k, UnitV()
    raise Stuck(StuckReason.UNKNOWN_FREE, name)


def _saturation(name: str) -> int:
    sig = lang.BUILTINS[name]
    return sig.arity + (1 if sig.cps else 0)


def evaluate(t: Term, max_steps: int = DEFAULT_MAX_STEPS) -> Value:
    """Call-by-value, left-to-right evaluation with builtin delta rules.

    Runs on an explicit continuation stack, so CPS loops of any length do not
    grow the Python stack.  Each beta, fix-unfold and delta step costs one.
    """
    budget = _Budget(max_steps)
    # frames: ("arg", term, env) | ("fun", value) | ("apply_to", value)
    stack: list[tuple] = []
    term: Term | None = t
    env: Env = None
    value: Value | None = None

    while True:
        if term is not None:
            match term:
                case Var(d):
                    value = _lookup(env, d)
                case FreeRef(v):
                    value = _free_value(v)
                case Abs(b, h):
                    value = Closure(b, env, h)
                case Fix(b):
                    value = FixV(b, env)
                case App(f, a):
                    stack.append(("arg", a, env))
                    term = f
                    continue
                case ExitHole(i):
                    raise HoleInTerm(f"exit {i} reached during evaluation")
            term = None

        if not stack:
            return value
        frame = stack.pop()
        if frame[0] == "arg":
            stack.append(("fun", value))
            term, env = frame[1], frame[2]
            continue
        fn, arg = frame[1], value
        if frame[0] == "apply_to":
            fn, arg = value, frame[1]

        # apply fn to arg, possibly through a chain of delta rules
        while True:
            match fn:
                case Closure(body, cenv):
                    budget.tick()
                    term, env = body, (arg, cenv)
                case FixV(body, fenv):
                    budget.tick()
                    stack.append(("apply_to", arg))
                    term, env = body, (fn, fenv)
                case NeutralV(head, spine):
                    spine = spine + (arg,)
                    if len(spine) < _saturation(head):
                        value = NeutralV(head, spine)
                    else:
                        budget.tick()
                        fn, arg = _delta(head, spine)
                        continue
                case _:
                    raise Stuck(StuckReason.TYPE_MISMATCH, f"cannot apply {fn}")
            break


def literal_term(x: int | bool) -> Term:
    return free(lang.literal_name(x))


def apply_cps(fn: Term, args: Iterable[int | bool], max_steps: int = DEFAULT_MAX_STEPS) -> Value:
    """Apply a curried CPS function to arguments with identity continuations.

    ``apply_cps(f, [a, b])`` evaluates ``f a (\\r. r b (\\r'. r'))``.
    """
    args = list(args)
    if not args:
        return evaluate(fn, max_steps)
    k: Term = Abs(Var(0), "r")
    for a in reversed(args[1:]):
        k = Abs(apps(Var(0), literal_term(a), k), "r")
    return evaluate(apps(fn, literal_term(args[0]), k), max_steps)
