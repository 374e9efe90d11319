import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import programs, terms
from structcps import cps, lang
from structcps.frontend import elaborate
from structcps.normalize import (
    BoolV,
    BudgetExceeded,
    HoleInTerm,
    IntV,
    NeutralV,
    Stuck,
    StuckReason,
    UnitV,
    apply_cps,
    beta_eta_normalize,
    beta_redexes,
    eta_redexes,
    evaluate,
)
from structcps.term import Abs, App, ExitHole, Fix, Var, alpha_eq, free, parse_term_text

P = parse_term_text


# -- normalization ------------------------------------------------------------------


def test_beta():
    assert beta_eta_normalize(App(Abs(Var(0)), free("y"))) == free("y")


def test_eta():
    assert beta_eta_normalize(Abs(App(free("f"), Var(0)))) == free("f")


def test_eta_needs_unused_variable():
    t = P("\\x. x x")
    assert beta_eta_normalize(t) == t


def test_beta_exposes_eta():
    assert alpha_eq(beta_eta_normalize(P("\\x. (\\y. f y) x")), free("f"))


def test_fix_is_not_unfolded():
    t = P("fix(\\self. \\n. self n)")
    # the body is an eta redex under the fix
    assert alpha_eq(beta_eta_normalize(t), P("fix(\\self. self)"))
    t = P("fix(\\self. \\n. self (f n))")
    assert beta_eta_normalize(t) == t


def test_normalize_reduces_under_binders():
    assert alpha_eq(beta_eta_normalize(P("\\k. (\\x. k x x) a")), P("\\k. k a a"))


def test_normalize_rejects_holes():
    with pytest.raises(HoleInTerm):
        beta_eta_normalize(App(Abs(Var(0)), ExitHole(0)))


def test_normalize_budget():
    omega = P("(\\x. x x) (\\x. x x)")
    with pytest.raises(BudgetExceeded):
        beta_eta_normalize(omega, max_steps=50)


def test_redex_counts():
    assert beta_redexes(P("(\\x. x) ((\\y. y) z)")) == 2
    assert eta_redexes(P("\\x. f x")) == 1
    assert eta_redexes(P("\\x. x x")) == 0


@settings(max_examples=200)
@given(terms(allow_inter=False))
def test_normalize_idempotent(t):
    try:
        n = beta_eta_normalize(t, max_steps=2_000)
    except BudgetExceeded:
        return
    assert alpha_eq(beta_eta_normalize(n), n)
    assert beta_redexes(n) == 0 and eta_redexes(n) == 0


# -- evaluation ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "src, expected",
    [
        ("sub 7 3 (\\r. r)", IntV(4)),
        ("add 7 3 (\\r. r)", IntV(10)),
        ("eq 2 2 (\\r. r)", BoolV(True)),
        ("eq true false (\\r. r)", BoolV(False)),
        ("gq 2 3 (\\r. r)", BoolV(False)),
        ("gq 3 3 (\\r. r)", BoolV(False)),
        ("not false (\\r. r)", BoolV(True)),
        ("if true (\\u. 1) (\\u. 2)", IntV(1)),
        ("if false (\\u. 1) (\\u. 2)", IntV(2)),
        ("if true (\\u. u) (\\u. 2)", UnitV()),
        ("assert true (\\r. r)", UnitV()),
        ("sub 1", NeutralV("sub", (IntV(1),))),
    ],
)
def test_delta_rules(src, expected):
    assert evaluate(P(src)) == expected


@pytest.mark.parametrize(
    "src, reason",
    [
        ("nope", StuckReason.UNKNOWN_FREE),
        ("%3", StuckReason.UNKNOWN_FREE),
        ("007", StuckReason.MALFORMED_LITERAL),
        ("sub true 1 (\\r. r)", StuckReason.TYPE_MISMATCH),
        ("eq 1 true (\\r. r)", StuckReason.TYPE_MISMATCH),
        ("not 0 (\\r. r)", StuckReason.TYPE_MISMATCH),
        ("if 1 (\\u. 1) (\\u. 2)", StuckReason.TYPE_MISMATCH),
        ("3 4", StuckReason.TYPE_MISMATCH),
        ("assert false (\\r. r)", StuckReason.ASSERTION_FAILED),
    ],
)
def test_stuck(src, reason):
    with pytest.raises(Stuck) as e:
        evaluate(P(src))
    assert e.value.reason is reason


def test_evaluate_rejects_holes():
    with pytest.raises(HoleInTerm):
        evaluate(App(Abs(Var(0)), ExitHole(0)))


def test_fix_unfolds_per_application():
    # counts down from 3 by recursion through the fix
    t = P("(fix(\\f. \\n. eq n 0 (\\z. if z (\\u. 42) (\\u. sub n 1 f)))) 3")
    assert evaluate(t) == IntV(42)


def test_budget_exceeded_on_divergence():
    with pytest.raises(BudgetExceeded):
        evaluate(App(Fix(Abs(App(Var(1), Var(0)))), free("0")), 1_000)


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        evaluate(free("0"), 0)


def test_long_loop_does_not_overflow_the_stack():
    t = cps.build(cps.val("i", "0", cps.seq(
        lang.while_(lang.gq("20000", "i"), cps.assign("i", lang.add("i", "1"))),
        "i",
    )))
    assert evaluate(t) == IntV(20_000)


def test_apply_cps_identity():
    assert apply_cps(cps.build(cps.abs_("x", "x")), [9]) == IntV(9)


def test_apply_cps_curried():
    t = cps.build(cps.abs_("a", cps.abs_("b", lang.sub("a", "b"))))
    assert apply_cps(t, [10, 3]) == IntV(7)


# -- properties ------------------------------------------------------------------------------


def run(t, args, budget):
    try:
        return apply_cps(t, args, budget)
    except Stuck as e:
        return e.reason


@settings(max_examples=150, deadline=None)
@given(programs())
def test_normalize_preserves_meaning(program):
    prog, args = program
    t = elaborate(prog)
    assert run(t, args, 100_000) == run(beta_eta_normalize(t), args, 100_000)


@settings(max_examples=100, deadline=None)
@given(programs(), st.integers(1, 400), st.integers(0, 10_000))
def test_budget_monotone(program, small, extra):
    prog, args = program
    t = elaborate(prog)
    try:
        first = run(t, args, small)
    except BudgetExceeded:
        return
    assert run(t, args, small + extra) == first
