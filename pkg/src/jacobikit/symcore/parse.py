"""Recursive-descent parser for scalar expressions.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('+'|'-')? base ('^' integer)?
    base   := rational | var | 'exp' '(' linform ')' | '(' expr ')'

A leading sign on a factor is accepted in addition to the strict grammar.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Optional

from ..errors import ParseError, UnknownVariableError
from .scalar import ONE, Scalar

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", pos + stripped)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, variables: Optional[frozenset]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def parse(self) -> Scalar:
        s = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return s

    def expr(self) -> Scalar:
        s = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            s = s + rhs if op == "+" else s - rhs
        return s

    def term(self) -> Scalar:
        s = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            rhs = self.factor()
            if op == "*":
                s = s * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", pos)
                s = s / rhs
        return s

    def factor(self) -> Scalar:
        sign = 1
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            if self.take()[1] == "-":
                sign = -sign
        s = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            k = self.integer()
            if k < 0 and s.is_zero():
                raise ParseError("negative power of zero", self.peek()[2])
            s = s ** k
        return -s if sign < 0 else s

    def integer(self) -> int:
        neg = False
        paren = False
        if self.peek()[1] == "(":
            self.take()
            paren = True
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            neg ^= self.take()[1] == "-"
        kind, val, pos = self.take()
        if kind != "num" or "." in val:
            raise ParseError("exponent must be an integer", pos)
        if paren:
            self.expect(")")
        return -int(val) if neg else int(val)

    def base(self) -> Scalar:
        kind, val, pos = self.take()
        if kind == "num":
            return Scalar.const(Fraction(val))
        if kind == "name":
            if val == "exp":
                self.expect("(")
                start = self.peek()[2]
                arg = self.expr()
                self.expect(")")
                try:
                    lin = arg.linear_form()
                except ValueError:
                    raise ParseError(
                        f"exp argument must be a linear form in the variables: {arg}", start
                    ) from None
                return Scalar.exp(lin)
            if self.variables is not None and val not in self.variables:
                raise UnknownVariableError(f"unknown variable {val}", pos)
            return Scalar.var(val)
        if val == "(":
            s = self.expr()
            self.expect(")")
            return s
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {found}", pos)


def parse_scalar(text: str, chart=None) -> Scalar:
    """Parse ``text`` into a canonical Scalar.

    ``chart`` may be a Chart, an iterable of variable names, or None (any
    identifier accepted).
    """
    variables = None
    if chart is not None:
        coords = getattr(chart, "coords", chart)
        variables = frozenset(coords)
    if not text.strip():
        raise ParseError("empty expression", 0)
    return _Parser(text, variables).parse()


def parse_many(texts: Iterable[str], chart=None):
    return [parse_scalar(t, chart) for t in texts]


__all__ = ["parse_scalar", "parse_many", "ONE"]
