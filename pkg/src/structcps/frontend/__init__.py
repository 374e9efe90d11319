"""Parser, scope checker, elaborator and reference interpreter for the surface language."""

from ..term import Term
from .elaborate import ScopeError, ScopeErrorKind, UnsupportedFeature, check_scopes, elaborate
from .interpret import AssertionFailed, FuelExhausted, InterpError, RefClosure, interpret
from .parser import ParseError, parse


def compile_source(source: str, *, eval_order: str = "ltr") -> Term:
    return elaborate(parse(source), eval_order=eval_order)


__all__ = [
    "AssertionFailed",
    "FuelExhausted",
    "InterpError",
    "ParseError",
    "RefClosure",
    "ScopeError",
    "ScopeErrorKind",
    "UnsupportedFeature",
    "check_scopes",
    "compile_source",
    "elaborate",
    "interpret",
    "parse",
]
