"""Lexer and recursive-descent parser for the surface language."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    STMT_TYPES,
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

KEYWORDS = frozenset(
    {"val", "def", "while", "do", "end", "if", "then", "else", "assert", "true", "false"}
)

_TOKEN = re.compile(
    r"(?P<skip>[ \t\r]+|\#[^\n]*)"
    r"|(?P<newline>\n)"
    r"|(?P<op>==|!=|=>|[=>\-+()\[\],])"
    r"|(?P<int>[0-9]+)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9_']*)"
)


class ParseError(Exception):
    def __init__(self, pos: Pos, expected: str, found: str = "") -> None:
        msg = f"expected {expected}" + (f", found {found}" if found else "")
        super().__init__(msg)
        self.pos = pos
        self.expected = expected
        self.message = msg


@dataclass(frozen=True)
class Token:
    kind: str  # name, int, kw, op, newline, eof
    text: str
    pos: Pos

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        if self.kind == "newline":
            return "end of line"
        return repr(self.text)


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(source):
        m = _TOKEN.match(source, i)
        pos = (line, i - line_start + 1)
        if m is None:
            raise ParseError(pos, "a token", repr(source[i]))
        kind = m.lastgroup
        text = m.group()
        if kind == "newline":
            tokens.append(Token("newline", text, pos))
            line, line_start = line + 1, m.end()
        elif kind == "name" and text in KEYWORDS:
            tokens.append(Token("kw", text, pos))
        elif kind != "skip":
            tokens.append(Token(kind, text, pos))
        i = m.end()
    tokens.append(Token("eof", "", (line, i - line_start + 1)))
    return tokens


class Parser:
    def __init__(self, source: str) -> None:
        self.tokens = tokenize(source)
        self.i = 0

    # -- token helpers ---------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        self.i += 1
        return tok

    def at(self, text: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok.kind in ("kw", "op") and tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            tok = self.peek()
            raise ParseError(tok.pos, repr(text), tok.describe())
        return self.advance()

    def expect_name(self) -> Token:
        tok = self.peek()
        if tok.kind != "name":
            raise ParseError(tok.pos, "a name", tok.describe())
        return self.advance()

    def skip_newlines(self) -> None:
        while self.peek().kind == "newline":
            self.i += 1

    # -- grammar -----------------------------------------------------------------

    def program(self) -> Seq:
        seq = self.block(())
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(tok.pos, "end of input", tok.describe())
        return seq

    def _at_closer(self, closers: tuple[str, ...]) -> bool:
        tok = self.peek()
        return tok.kind == "eof" or (tok.kind == "kw" and tok.text in closers)

    def block(self, closers: tuple[str, ...]) -> Seq:
        self.skip_newlines()
        start = self.peek().pos
        items = []
        while not self._at_closer(closers):
            items.append(self.item())
            if self._at_closer(closers):
                break
            tok = self.peek()
            if tok.kind != "newline":
                raise ParseError(tok.pos, "end of line", tok.describe())
            self.skip_newlines()
        if not items:
            tok = self.peek()
            raise ParseError(tok.pos, "expression", tok.describe())
        stmts = []
        for item in items[:-1]:
            if isinstance(item, If):
                item = IfStmt(item.cond, item.then, item.else_, item.pos)
            elif not isinstance(item, STMT_TYPES):
                raise ParseError(item.pos, "a statement", "an expression")
            stmts.append(item)
        last = items[-1]
        if isinstance(last, STMT_TYPES):
            return Seq(tuple(stmts) + (last,), None, start)
        return Seq(tuple(stmts), last, start)

    def item(self):
        tok = self.peek()
        if self.at("val"):
            self.advance()
            name = self.expect_name()
            self.expect("=")
            self.skip_newlines()
            return ValDecl(name.text, self.expr(), tok.pos)
        if self.at("def"):
            self.advance()
            name = self.expect_name()
            self.expect("(")
            param = None if self.at(")") else self.expect_name().text
            self.expect(")")
            self.expect("=")
            self.skip_newlines()
            return DefDecl(name.text, param, self.def_body(), tok.pos)
        if self.at("while"):
            self.advance()
            cond = self.expr()
            self.expect("do")
            body = self.block(("end",))
            self.expect("end")
            return While(cond, body, tok.pos)
        if self.at("assert"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return Assert(cond, tok.pos)
        if tok.kind == "name" and self.at("=", 1):
            return self.assignment()
        return self.expr()

    def assignment(self) -> Assign:
        name = self.expect_name()
        self.expect("=")
        self.skip_newlines()
        return Assign(name.text, self.expr(), name.pos)

    def def_body(self) -> Seq:
        tok = self.peek()
        if tok.kind == "name" and self.at("=", 1):
            return Seq((self.assignment(),), None, tok.pos)
        return Seq((), self.expr(), tok.pos)

    def expr(self) -> Expr:
        tok = self.peek()
        if tok.kind == "name" and self.at("=>", 1):
            self.advance()
            self.advance()
            body = self.block(("end",))
            self.expect("end")
            return Lambda(tok.text, body, tok.pos)
        if self.at("if"):
            self.advance()
            cond = self.expr()
            self.expect("then")
            then = self.block(("else", "end"))
            else_ = None
            if self.at("else"):
                self.advance()
                else_ = self.block(("end",))
            self.expect("end")
            return If(cond, then, else_, tok.pos)
        return self.comparison()

    def comparison(self) -> Expr:
        left = self.additive()
        while self.at("==") or self.at("!=") or self.at(">"):
            op = self.advance()
            self.skip_newlines()
            right = self.additive()
            if op.text == "!=":
                left = NotOp(BinOp("==", left, right, op.pos), op.pos)
            else:
                left = BinOp(op.text, left, right, op.pos)
        return left

    def additive(self) -> Expr:
        left = self.application()
        while self.at("+") or self.at("-"):
            op = self.advance()
            self.skip_newlines()
            left = BinOp(op.text, left, self.application(), op.pos)
        return left

    def _starts_atom(self) -> bool:
        tok = self.peek()
        if tok.kind in ("name", "int"):
            return True
        # a do-block argument needs parentheses, or `while c do` would misparse
        return tok.kind in ("kw", "op") and tok.text in ("true", "false", "(", "[")

    def application(self) -> Expr:
        fn = self.atom()
        while self._starts_atom():
            if self.at("(") and self.at(")", 1):
                pos = self.advance().pos
                self.advance()
                fn = CallUnit(fn, pos)
            else:
                arg = self.atom()
                fn = Call(fn, arg, arg.pos)
        return fn

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "name":
            self.advance()
            return VarRef(tok.text, tok.pos)
        if tok.kind == "int":
            self.advance()
            return IntLit(int(tok.text), tok.pos)
        if self.at("true") or self.at("false"):
            self.advance()
            return BoolLit(tok.text == "true", tok.pos)
        if self.at("do"):
            self.advance()
            body = self.block(("end",))
            self.expect("end")
            return body
        if self.at("("):
            self.advance()
            if self.at(")"):
                self.advance()
                return UnitLit(tok.pos)
            self.skip_newlines()
            inner = self.expr()
            self.skip_newlines()
            self.expect(")")
            return inner
        if self.at("["):
            self.advance()
            items = []
            if not self.at("]"):
                items.append(self.expr())
                while self.at(","):
                    self.advance()
                    items.append(self.expr())
            self.expect("]")
            return ListLit(tuple(items), tok.pos)
        raise ParseError(tok.pos, "expression", tok.describe())


def parse(source: str) -> Seq:
    """Parse a program (a block) into a ``Seq``."""
    return Parser(source).program()
