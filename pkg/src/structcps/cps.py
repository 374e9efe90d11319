"""The CPS builder.

A ``Builder`` mimics evaluation of an imperative program while emitting a
pure lambda term in continuation-passing style.  The term under construction
is a stack of hole-filling wrappers; expression operations return the ``Val``
naming their result, statements return ``None``, and ``end`` closes the
current sequential path.

Builder computations are plain callables ``Builder -> Val | None``.  A bare
string stands for the free variable of that name and a ``Val`` for itself, so
``assign("a", sub("a", "b"))`` reads like the source program.

Blocks and exits: ``call_cc_``, ``call_cc`` and ``loop`` run their block in a
child builder, collect the variables it assigns, and fill every jump out of
the block (an ``ExitHole``) with the continuation applied to the latest
values of those variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

from .term import (
    Abs,
    App,
    ExitHole,
    Fix,
    Free,
    FreeRef,
    Inter,
    Term,
    Val,
    abstract,
    apps,
    holes,
)

Comp = Union[Callable[["Builder"], Union[Val, None]], str, Inter, Free]
ExitToken = Callable[["Builder"], None]


class BuildError(Exception):
    pass


class EmissionAfterEnd(BuildError):
    def __init__(self) -> None:
        super().__init__("emission after the computation has ended")


class NotAssignable(BuildError):
    def __init__(self, name: str) -> None:
        super().__init__(f"{name} cannot be assigned here.")
        self.name = name


class EmptyName(BuildError):
    def __init__(self) -> None:
        super().__init__("free variable names must be non-empty")


class UnterminatedBlock(BuildError):
    def __init__(self, kind: str) -> None:
        super().__init__(f"{kind} block must end by taking an exit")


class NoValue(BuildError):
    def __init__(self) -> None:
        super().__init__("expression produced no value")


class UnfilledExit(BuildError):
    def __init__(self, index: int) -> None:
        super().__init__(f"exit {index} was never filled")


@dataclass
class Session:
    """State shared by every builder of one compilation."""

    eval_order: str = "ltr"
    next_inter: int = 0
    exits: dict[int, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.eval_order not in ("ltr", "rtl"):
            raise ValueError(f"eval_order must be 'ltr' or 'rtl', not {self.eval_order!r}")


@dataclass(frozen=True)
class BlockOutcome:
    body: Term
    assigned: tuple[str, ...]


def bind(v: Val, body: Term, hint: str | None = None) -> Term:
    """Wrap ``body`` in an abstraction binding ``v``."""
    if hint is None:
        hint = v.name if isinstance(v, Free) else "r"
    return Abs(abstract(v, body), hint)


def bind_all(vals: list[Val], body: Term) -> Term:
    for v in reversed(vals):
        body = bind(v, body)
    return body


def fill_exits(body: Term, index: int, target: Val, assigned: list[str] | tuple[str, ...]) -> Term:
    """Replace each hole ``index`` with ``target x1 .. xn thrown..``.

    The assigned variables are resolved through the abstractions recorded on
    the hole, so each one names the binding in force at the jump site.
    """
    names: list[Val] = [target, *(Free(x) for x in assigned)]

    def go(t: Term) -> Term:
        match t:
            case ExitHole(i, thrown, bound):
                thrown = tuple(go(x) for x in thrown)
                if i != index:
                    return ExitHole(i, thrown, bound)
                env = dict(bound)
                head = [env.get(v, FreeRef(v)) for v in names]
                return apps(head[0], *head[1:], *thrown)
            case App(f, a):
                return App(go(f), go(a))
            case Abs(b, h):
                return Abs(go(b), h)
            case Fix(b, h):
                return Fix(go(b), h)
        return t

    return go(body)


class Builder:
    def __init__(
        self,
        session: Session | None = None,
        scope: list[str] | tuple[str, ...] = (),
        *,
        eval_order: str = "ltr",
    ) -> None:
        self.session = session if session is not None else Session(eval_order)
        self.scope: dict[str, None] = dict.fromkeys(scope)
        self.assigned: dict[str, None] = {}
        self.terminated = False
        self.result: Term | None = None
        self._wrappers: list[Callable[[Term], Term]] = []

    # -- primitives ------------------------------------------------------

    def _check_open(self) -> None:
        if self.terminated:
            raise EmissionAfterEnd()

    def next_index(self) -> int:
        self._check_open()
        i = self.session.next_inter
        self.session.next_inter += 1
        return i

    def fresh(self) -> Inter:
        return Inter(self.next_index())

    def free(self, name: str) -> Free:
        if not name:
            raise EmptyName()
        return Free(name)

    def nest(self, wrap: Callable[[Term], Term]) -> None:
        self._check_open()
        self._wrappers.append(wrap)

    def end(self, t: Term) -> None:
        self._check_open()
        for i in {h.index for h in holes(t)}:
            if i not in self.session.exits:
                raise BuildError(f"exit {i} is not registered")
        for wrap in reversed(self._wrappers):
            t = wrap(t)
        self._wrappers.clear()
        self.result = t
        self.terminated = True

    def run(self, comp: Comp) -> Val | None:
        if isinstance(comp, str):
            return self.free(comp)
        if isinstance(comp, (Inter, Free)):
            return comp
        return comp(self)

    def value(self, comp: Comp) -> Val:
        v = self.run(comp)
        if v is None:
            raise NoValue()
        return v

    def record(self, name: str) -> None:
        if name in self.scope:
            self.assigned.setdefault(name)

    def new_exit(self, kind: str) -> int:
        i = self.next_index()
        self.session.exits[i] = kind
        return i

    # -- blocks ------------------------------------------------------------

    def run_block(self, comp: Comp, kind: str = "block") -> BlockOutcome:
        """Run ``comp`` as a block in a child builder sharing this session."""
        child = Builder(self.session, list(self.scope))
        child.run(comp)
        if not child.terminated:
            raise UnterminatedBlock(kind)
        for x in child.assigned:
            self.record(x)
        assert child.result is not None
        return BlockOutcome(child.result, tuple(child.assigned))

    def _join(self, index: int, k: Inter, outcome: BlockOutcome, with_value: bool) -> Val | None:
        if not holes(outcome.body, index):
            # the exit is never taken, so the successor is unreachable
            self.end(outcome.body)
            return None
        body = fill_exits(outcome.body, index, k, outcome.assigned)
        params: list[Val] = [Free(x) for x in outcome.assigned]
        r = self.fresh() if with_value else None
        if r is not None:
            params.append(r)
        self.nest(lambda inner: App(bind(k, body, "k"), bind_all(params, inner)))
        return r

    def call_cc_(self, block: Callable[[ExitToken], Comp]) -> None:
        """Run a block whose exit continues with the successor of this call."""
        i = self.new_exit("callCC_")
        k = self.fresh()

        def exit_(b: Builder) -> None:
            b.end(ExitHole(i))

        self._join(i, k, self.run_block(block(exit_), "callCC_"), with_value=False)

    def call_cc(self, block: Callable[[Callable[[Comp], ExitToken]], Comp]) -> Val | None:
        """As ``call_cc_``, but the exit throws a value, which this call returns."""
        i = self.new_exit("callCC")
        k = self.fresh()

        def throw(comp: Comp) -> ExitToken:
            def exit_(b: Builder) -> None:
                v = b.value(comp)
                b.end(ExitHole(i, (FreeRef(v),)))

            return exit_

        return self._join(i, k, self.run_block(block(throw), "callCC"), with_value=True)

    def loop(self, block: Callable[[ExitToken], Comp]) -> None:
        """Run a block whose exit re-enters the block; ends this path."""
        i = self.new_exit("loop")
        me = self.fresh()

        def again(b: Builder) -> None:
            b.end(ExitHole(i))

        outcome = self.run_block(block(again), "loop")
        names = outcome.assigned
        body = fill_exits(outcome.body, i, me, names)
        fix = Fix(abstract(me, bind_all([Free(x) for x in names], body)), "loop")
        self.end(apps(fix, *(FreeRef(Free(x)) for x in names)))

    # -- binding and assignment -----------------------------------------------

    def with_local(self, x: str, body: Comp) -> Val | None:
        """Run ``body`` with ``x`` assignable; assignments to ``x`` stay local."""
        saved = dict(self.scope)
        already = x in self.assigned
        self.scope[x] = None
        try:
            v = self.run(body)
        finally:
            self.scope = saved
        if not already:
            self.assigned.pop(x, None)
        return v

    def val(self, x: str, rhs: Comp, body: Comp) -> Val | None:
        self.free(x)
        # rhs runs before the join so that its assignments belong to this block
        v = self.value(rhs)

        def block(k: Callable[[Comp], ExitToken]) -> Comp:
            def go(b: Builder) -> None:
                b.nest(lambda inner: App(bind(Free(x), inner), FreeRef(v)))
                result = b.with_local(x, body)
                if not b.terminated:
                    b.run(k(b.value(result)))

            return go

        return self.call_cc(block)

    def assign(self, x: str, rhs: Comp) -> None:
        if x not in self.scope:
            raise NotAssignable(x)
        v = self.value(rhs)
        self.nest(lambda inner: App(bind(Free(x), inner), FreeRef(v)))
        self.assigned.setdefault(x)

    def def_abs(self, param: str, body: Comp) -> Val:
        """Build a one-argument CPS function ``\\param k. body-then-k``.

        The body runs with only ``param`` assignable.
        """
        self.free(param)
        child = Builder(self.session, [param])
        k = child.fresh()
        v = child.value(body)
        child.end(App(FreeRef(k), FreeRef(v)))
        assert child.result is not None
        fn = bind(Free(param), bind(k, child.result, "k"))
        f = self.fresh()
        self.nest(lambda inner: App(bind(f, inner, "f"), fn))
        return f

    def apply(self, f: Comp, a: Comp) -> Val:
        if self.session.eval_order == "ltr":
            fv = self.value(f)
            av = self.value(a)
        else:
            av = self.value(a)
            fv = self.value(f)
        r = self.fresh()
        self.nest(lambda inner: apps(FreeRef(fv), FreeRef(av), bind(r, inner)))
        return r


# -- combinator forms ------------------------------------------------------------
# Each returns a computation, so programs compose like the source language.


def call_cc_(block: Callable[[ExitToken], Comp]) -> Comp:
    return lambda b: b.call_cc_(block)


def call_cc(block: Callable[[Callable[[Comp], ExitToken]], Comp]) -> Comp:
    return lambda b: b.call_cc(block)


def loop(block: Callable[[ExitToken], Comp]) -> Comp:
    return lambda b: b.loop(block)


def val(x: str, rhs: Comp, body: Comp) -> Comp:
    return lambda b: b.val(x, rhs, body)


def assign(x: str, rhs: Comp) -> Comp:
    return lambda b: b.assign(x, rhs)


def abs_(param: str, body: Comp) -> Comp:
    return lambda b: b.def_abs(param, body)


def app(f: Comp, a: Comp) -> Comp:
    return lambda b: b.apply(f, a)


def seq(*comps: Comp) -> Comp:
    """Run computations in order; the value is the last one's."""

    def go(b: Builder) -> Val | None:
        v = None
        for c in comps:
            v = b.run(c)
        return v

    return go


def nop(b: Builder) -> None:
    return None


def _check_final(t: Term) -> Term:
    for h in holes(t):
        raise UnfilledExit(h.index)
    return t


def build(comp: Comp, *, eval_order: str = "ltr") -> Term:
    """Compile a computation to the term denoting its value."""
    b = Builder(eval_order=eval_order)
    v = b.value(comp)
    b.end(FreeRef(v))
    assert b.result is not None
    return _check_final(b.result)


def build_cps(comp: Comp, *, eval_order: str = "ltr") -> Term:
    """Compile a computation to ``\\k. ...`` which passes its value to ``k``."""
    b = Builder(eval_order=eval_order)
    k = b.fresh()
    v = b.value(comp)
    b.end(App(FreeRef(k), FreeRef(v)))
    assert b.result is not None
    return _check_final(bind(k, b.result, "k"))


__all__ = [
    "BlockOutcome",
    "BuildError",
    "Builder",
    "Comp",
    "EmissionAfterEnd",
    "EmptyName",
    "NoValue",
    "NotAssignable",
    "Session",
    "UnfilledExit",
    "UnterminatedBlock",
    "abs_",
    "app",
    "assign",
    "bind",
    "bind_all",
    "build",
    "build_cps",
    "call_cc",
    "call_cc_",
    "fill_exits",
    "loop",
    "nop",
    "seq",
    "val",
]
