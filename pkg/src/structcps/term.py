"""Scope-safe lambda terms with de Bruijn bound variables.

Bound variables are natural-number depths (0 = innermost binder); free
variables are drawn from the ``Val`` alphabet.  ``ExitHole`` is the one
primitive structure: a placeholder for a jump out of a block, filled in once
the block's assignments are known (see ``structcps.cps.fill_exits``).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Callable, Iterator, Union


@dataclass(frozen=True, slots=True)
class Inter:
    """Machine-generated intermediate, issued by the builder's counter."""

    index: int

    def __str__(self) -> str:
        return f"%{self.index}"


@dataclass(frozen=True, slots=True)
class Free:
    """User-visible named free variable (also literals and builtins)."""

    name: str

    def __str__(self) -> str:
        return self.name


Val = Union[Inter, Free]


@dataclass(frozen=True, slots=True)
class Var:
    depth: int


@dataclass(frozen=True, slots=True)
class FreeRef:
    val: Val


@dataclass(frozen=True, slots=True)
class App:
    fun: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class Abs:
    body: Term
    hint: str | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class Fix:
    """Fixpoint; binds exactly one index, the recursive self-reference."""

    body: Term
    hint: str | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class ExitHole:
    """Jump placeholder.

    ``thrown`` holds extra values passed after the block's assigned
    variables.  ``bound`` records abstractions that were applied over the hole
    before it was filled: each pair maps a Val that the fill will mention to
    the term it must become at the hole's position (innermost binding first).
    """

    index: int
    thrown: tuple[Term, ...] = ()
    bound: tuple[tuple[Val, Term], ...] = ()


Term = Union[Var, FreeRef, App, Abs, Fix, ExitHole]


def free(name: str) -> FreeRef:
    return FreeRef(Free(name))


def inter(index: int) -> FreeRef:
    return FreeRef(Inter(index))


def apps(fun: Term, *args: Term) -> Term:
    for arg in args:
        fun = App(fun, arg)
    return fun


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add ``by`` to every bound index at or above ``cutoff``."""
    if by == 0:
        return t

    def go(t: Term, c: int) -> Term:
        match t:
            case Var(d):
                return Var(d + by) if d >= c else t
            case FreeRef():
                return t
            case App(f, a):
                return App(go(f, c), go(a, c))
            case Abs(b, h):
                return Abs(go(b, c + 1), h)
            case Fix(b, h):
                return Fix(go(b, c + 1), h)
            case ExitHole(i, thrown, bound):
                return ExitHole(
                    i,
                    tuple(go(x, c) for x in thrown),
                    tuple((v, go(x, c)) for v, x in bound),
                )
        raise TypeError(f"not a term: {t!r}")

    return go(t, cutoff)


def abstract(match: Val | Callable[[Val], bool], t: Term) -> Term:
    """Prepare ``t`` to sit under one new binder, binding the matching frees.

    ``match`` is either a single Val or a predicate over Vals.  Exit holes can
    only be abstracted over a single Val, since the hole has to remember the
    binding for names its eventual fill will introduce.
    """
    if isinstance(match, (Inter, Free)):
        target: Val | None = match
        pred: Callable[[Val], bool] = lambda v: v == target
    else:
        target, pred = None, match

    def go(t: Term, depth: int) -> Term:
        match t:
            case Var(d):
                return Var(d + 1) if d >= depth else t
            case FreeRef(v):
                return Var(depth) if pred(v) else t
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case Abs(b, h):
                return Abs(go(b, depth + 1), h)
            case Fix(b, h):
                return Fix(go(b, depth + 1), h)
            case ExitHole(i, thrown, bound):
                if target is None:
                    raise ValueError("exit holes can only be abstracted over a single Val")
                bound = tuple((v, go(x, depth)) for v, x in bound)
                if all(v != target for v, _ in bound):
                    bound += ((target, Var(depth)),)
                return ExitHole(i, tuple(go(x, depth) for x in thrown), bound)
        raise TypeError(f"not a term: {t!r}")

    return go(t, 0)


def instantiate(replacement: Term, body: Term) -> Term:
    """Substitute ``replacement`` for index 0 of ``body``, removing that binder."""

    def go(t: Term, depth: int) -> Term:
        match t:
            case Var(d):
                if d == depth:
                    return shift(replacement, depth)
                return Var(d - 1) if d > depth else t
            case FreeRef():
                return t
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case Abs(b, h):
                return Abs(go(b, depth + 1), h)
            case Fix(b, h):
                return Fix(go(b, depth + 1), h)
            case ExitHole(i, thrown, bound):
                return ExitHole(
                    i,
                    tuple(go(x, depth) for x in thrown),
                    tuple((v, go(x, depth)) for v, x in bound),
                )
        raise TypeError(f"not a term: {t!r}")

    return go(body, 0)


def alpha_eq(a: Term, b: Term) -> bool:
    # hints are excluded from dataclass equality
    return a == b


def occurs(t: Term, depth: int = 0) -> bool:
    """True if bound index ``depth`` (relative to the root of ``t``) occurs."""
    match t:
        case Var(d):
            return d == depth
        case FreeRef():
            return False
        case App(f, a):
            return occurs(f, depth) or occurs(a, depth)
        case Abs(b) | Fix(b):
            return occurs(b, depth + 1)
        case ExitHole(_, thrown, bound):
            return any(occurs(x, depth) for x in thrown) or any(
                occurs(x, depth) for _, x in bound
            )
    raise TypeError(f"not a term: {t!r}")


def scope_check(t: Term) -> str | None:
    """Return None if ``t`` is well-scoped, else the path of the first bad index."""

    def go(t: Term, depth: int, path: str) -> str | None:
        match t:
            case Var(d):
                return path or "." if d >= depth else None
            case FreeRef():
                return None
            case App(f, a):
                return go(f, depth, path + ".fun") or go(a, depth, path + ".arg")
            case Abs(b) | Fix(b):
                return go(b, depth + 1, path + ".body")
            case ExitHole(_, thrown, bound):
                for n, x in enumerate(thrown):
                    if bad := go(x, depth, f"{path}.thrown[{n}]"):
                        return bad
                for n, (_, x) in enumerate(bound):
                    if bad := go(x, depth, f"{path}.bound[{n}]"):
                        return bad
                return None
        raise TypeError(f"not a term: {t!r}")

    return go(t, 0, "")


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order traversal, function before argument."""
    stack = [t]
    while stack:
        t = stack.pop()
        yield t
        match t:
            case App(f, a):
                stack.append(a)
                stack.append(f)
            case Abs(b) | Fix(b):
                stack.append(b)
            case ExitHole(_, thrown, bound):
                stack.extend(x for _, x in reversed(bound))
                stack.extend(reversed(thrown))


def free_vals(t: Term) -> list[Val]:
    seen: dict[Val, None] = {}
    for s in subterms(t):
        if isinstance(s, FreeRef):
            seen.setdefault(s.val)
    return list(seen)


def size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def holes(t: Term, index: int | None = None) -> list[ExitHole]:
    return [
        s
        for s in subterms(t)
        if isinstance(s, ExitHole) and (index is None or s.index == index)
    ]


# -- text format -------------------------------------------------------------

_BOUND_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_TOKEN = re.compile(
    r"\s*(?:(?P<fix>fix\()|(?P<punct>[\\.()])|(?P<inter>%[0-9]+)"
    r"|(?P<name>-?[0-9]+|[A-Za-z_][A-Za-z0-9_']*)|(?P<bad>\S))"
)
_TERM, _FUN, _ATOM = 0, 1, 2


class TermSyntaxError(ValueError):
    pass


def _fresh_name(hint: str | None, default: str, taken: set[str]) -> str:
    name = hint if hint and _BOUND_NAME.match(hint) and hint != "fix" else default
    while name in taken:
        name += "'"
    return name


def render_text(t: Term) -> str:
    """Render in the ``\\x. f x`` text syntax; bound names come from hints."""
    frees = {v.name for v in free_vals(t) if isinstance(v, Free)} | {"fix"}

    def go(t: Term, names: list[str], level: int) -> str:
        match t:
            case Var(d):
                return names[-1 - d] if d < len(names) else f"<unbound {d}>"
            case FreeRef(Inter(i)):
                return f"%{i}"
            case FreeRef(Free(n)):
                return n
            case App(f, a):
                s = f"{go(f, names, _FUN)} {go(a, names, _ATOM)}"
                return f"({s})" if level == _ATOM else s
            case Abs(b, h):
                n = _fresh_name(h, "x", frees | set(names))
                s = f"\\{n}. {go(b, names + [n], _TERM)}"
                return s if level == _TERM else f"({s})"
            case Fix(b, h):
                n = _fresh_name(h, "self", frees | set(names))
                s = f"fix(\\{n}. {go(b, names + [n], _TERM)})"
                return s if level == _TERM else f"({s})"
            case ExitHole(i, thrown):
                extra = "".join(" " + go(x, names, _ATOM) for x in thrown)
                return f"⟨exit:{i}{extra}⟩"
        raise TypeError(f"not a term: {t!r}")

    return go(t, [], _TERM)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        assert m is not None
        kind = m.lastgroup
        if kind == "bad":
            raise TermSyntaxError(f"unexpected character {m.group(kind)!r} at offset {m.start(kind)}")
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


def parse_term_text(text: str) -> Term:
    """Inverse of ``render_text`` on well-scoped, hole-free terms."""
    tokens = _tokenize(text)
    pos = 0

    def peek() -> tuple[str, str, int] | None:
        return tokens[pos] if pos < len(tokens) else None

    def expect(value: str) -> None:
        nonlocal pos
        tok = peek()
        if tok is None or tok[1] != value:
            where = f"offset {tok[2]}" if tok else "end of input"
            raise TermSyntaxError(f"expected {value!r} at {where}")
        pos += 1

    def binder() -> str:
        nonlocal pos
        expect("\\")
        tok = peek()
        if tok is None or tok[0] != "name" or not _BOUND_NAME.match(tok[1]):
            raise TermSyntaxError("expected a binder name")
        pos += 1
        expect(".")
        return tok[1]

    def term(env: list[str]) -> Term:
        nonlocal pos
        tok = peek()
        if tok and tok[1] == "\\":
            n = binder()
            return Abs(term(env + [n]), n)
        if tok and tok[0] == "fix":
            pos += 1
            n = binder()
            body = term(env + [n])
            expect(")")
            return Fix(body, n)
        fun = atom(env)
        while (tok := peek()) and tok[1] not in (")",):
            fun = App(fun, atom(env))
        return fun

    def atom(env: list[str]) -> Term:
        nonlocal pos
        tok = peek()
        if tok is None:
            raise TermSyntaxError("unexpected end of input")
        kind, value, offset = tok
        pos += 1
        if kind == "name":
            for d, n in enumerate(reversed(env)):
                if n == value:
                    return Var(d)
            return free(value)
        if kind == "inter":
            return inter(int(value[1:]))
        if value == "(":
            t = term(env)
            expect(")")
            return t
        raise TermSyntaxError(f"unexpected {value!r} at offset {offset}")

    result = term([])
    if pos != len(tokens):
        raise TermSyntaxError(f"trailing input at offset {tokens[pos][2]}")
    return result


# -- JSON ----------------------------------------------------------------------


def to_json_obj(t: Term) -> dict:
    match t:
        case Var(d):
            return {"tag": "Var", "depth": d}
        case FreeRef(Free(n)):
            return {"tag": "Free", "name": n}
        case FreeRef(Inter(i)):
            return {"tag": "Inter", "index": i}
        case App(f, a):
            return {"tag": "App", "fun": to_json_obj(f), "arg": to_json_obj(a)}
        case Abs(b, h):
            return {"tag": "Abs", "hint": h, "body": to_json_obj(b)}
        case Fix(b, h):
            return {"tag": "Fix", "hint": h, "body": to_json_obj(b)}
        case ExitHole(i, thrown, bound):
            obj = {"tag": "Exit", "index": i, "thrown": [to_json_obj(x) for x in thrown]}
            if bound:
                obj["bound"] = [
                    {"val": to_json_obj(FreeRef(v)), "term": to_json_obj(x)} for v, x in bound
                ]
            return obj
    raise TypeError(f"not a term: {t!r}")


def from_json_obj(obj: dict) -> Term:
    match obj["tag"]:
        case "Var":
            return Var(obj["depth"])
        case "Free":
            return free(obj["name"])
        case "Inter":
            return inter(obj["index"])
        case "App":
            return App(from_json_obj(obj["fun"]), from_json_obj(obj["arg"]))
        case "Abs":
            return Abs(from_json_obj(obj["body"]), obj["hint"])
        case "Fix":
            return Fix(from_json_obj(obj["body"]), obj["hint"])
        case "Exit":
            bound = tuple(
                (from_json_obj(b["val"]).val, from_json_obj(b["term"]))
                for b in obj.get("bound", ())
            )
            return ExitHole(obj["index"], tuple(from_json_obj(x) for x in obj["thrown"]), bound)
    raise ValueError(f"unknown tag {obj['tag']!r}")


def render_json(t: Term) -> str:
    return json.dumps(to_json_obj(t), ensure_ascii=False)


def parse_json(text: str) -> Term:
    return from_json_obj(json.loads(text))
