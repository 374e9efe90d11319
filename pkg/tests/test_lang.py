import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import programs
from structcps import cps, lang
from structcps.frontend import elaborate
from structcps.lang import BUILTINS, MalformedLiteral, UnknownBuiltin
from structcps.normalize import BoolV, IntV, beta_eta_normalize, evaluate
from structcps.term import App, FreeRef, Free, alpha_eq, parse_term_text, subterms


def test_registry():
    assert {n: s.arity for n, s in BUILTINS.items()} == {
        "eq": 2, "gq": 2, "sub": 2, "add": 2, "not": 1, "if": 3, "assert": 1,
    }
    assert not BUILTINS["if"].cps
    assert lang.RESERVED >= set(BUILTINS) | {"true", "false", "unit"}


@pytest.mark.parametrize(
    "name, value",
    [("0", 0), ("-12", -12), ("true", True), ("false", False), ("unit", lang.UNIT)],
)
def test_literal_values(name, value):
    assert lang.literal_value(name) == value
    assert lang.literal_name(value) == name


@pytest.mark.parametrize("name", ["007", "-0", "+1", "x"])
def test_malformed_literals(name):
    with pytest.raises(MalformedLiteral):
        lang.literal_value(name)


def test_unknown_builtin():
    with pytest.raises(UnknownBuiltin):
        lang.prim("mul", "1", "2")
    # if has no continuation, so it is not callable as a prim
    with pytest.raises(UnknownBuiltin):
        lang.prim("if", "true", "1", "2")


def test_prim_shape():
    t = beta_eta_normalize(cps.build_cps(lang.sub("a", "b")))
    assert alpha_eq(t, parse_term_text("sub a b"))


def test_prims_chain():
    t = beta_eta_normalize(cps.build_cps(lang.not_(lang.eq("b", "0"))))
    assert alpha_eq(t, parse_term_text("\\k. eq b 0 (\\r. not r k)"))


def test_eq_reflexive():
    assert evaluate(cps.build(lang.eq("3", "3"))) == BoolV(True)


def test_cond_of_constants_applies_if_to_thunks():
    t = beta_eta_normalize(cps.build_cps(lang.cond("c", "1", "2")))
    assert alpha_eq(t, parse_term_text("\\k. if c (\\u. k 1) (\\u. k 2)"))


@pytest.mark.parametrize("c, expected", [("true", 1), ("false", 2)])
def test_cond_literal(c, expected):
    assert evaluate(cps.build(lang.cond(c, "1", "2"))) == IntV(expected)


@given(st.booleans())
def test_cond_identical_branches(c):
    t = cps.build(lang.cond(lang.literal_name(c), "7", "7"))
    assert evaluate(t) == IntV(7)


def test_cond_merges_branch_assignments():
    # v is assigned in one branch only; w in both
    prog = cps.val("v", "0", cps.val("w", "0", cps.seq(
        lang.cond_(
            "c",
            cps.seq(cps.assign("v", "1"), cps.assign("w", "2")),
            cps.assign("w", "3"),
        ),
        lang.add(lang.add("v", "v"), "w"),
    )))
    for c, expected in [("true", 4), ("false", 3)]:
        t = cps.build(cps.val("c", c, prog))
        assert evaluate(t) == IntV(expected)


def test_cond_with_empty_branches_drops_join():
    t = beta_eta_normalize(cps.build_cps(cps.seq(lang.cond_("c", cps.nop, cps.nop), "z")))
    assert alpha_eq(t, parse_term_text("\\k. if c (\\u. k z) (\\u. k z)"))


def test_while_false_runs_zero_times():
    t = cps.build(cps.val("i", "0", cps.seq(lang.while_("false", cps.assign("i", "1")), "i")))
    assert evaluate(t) == IntV(0)


def test_counting_loop():
    t = cps.build(cps.val("i", "0", cps.seq(
        lang.while_(lang.not_(lang.eq("i", "5")), cps.assign("i", lang.add("i", "1"))),
        "i",
    )))
    assert evaluate(t) == IntV(5)


def test_while_is_its_expansion():
    def body():
        return cps.assign("i", lang.add("i", "1"))

    def c():
        return lang.gq("3", "i")

    direct = cps.val("i", "0", cps.seq(lang.while_(c(), body()), "i"))
    expanded = cps.val("i", "0", cps.seq(
        cps.call_cc_(lambda brk: cps.loop(lambda cont: lang.cond(c(), cps.seq(body(), cont), brk))),
        "i",
    ))
    assert alpha_eq(cps.build(direct), cps.build(expanded))


def spines(t):
    """Yield (head name, argument count) for every maximal application spine."""
    inner_funs = set()
    for s in subterms(t):
        if isinstance(s, App):
            inner_funs.add(id(s.fun))
    for s in subterms(t):
        if isinstance(s, (App, FreeRef)) and id(s) not in inner_funs:
            n, head = 0, s
            while isinstance(head, App):
                head, n = head.fun, n + 1
            if isinstance(head, FreeRef) and isinstance(head.val, Free):
                yield head.val.name, n


@settings(max_examples=200, deadline=None)
@given(programs())
def test_builtin_call_sites_are_saturated(program):
    t = elaborate(program[0])
    for name, n in spines(t):
        if name in BUILTINS:
            sig = BUILTINS[name]
            assert n == sig.arity + (1 if sig.cps else 0), name
    # eta may drop a trailing continuation, but never adds arguments
    for name, n in spines(beta_eta_normalize(t)):
        if name in BUILTINS:
            sig = BUILTINS[name]
            assert n <= sig.arity + (1 if sig.cps else 0), name
