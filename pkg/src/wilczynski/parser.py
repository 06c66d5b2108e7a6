"""Recursive-descent parser for the equation input language.

Grammar (whitespace insignificant)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := ("-" | "+") factor | base ("^" integer)?
    base   := number | ident | "(" expr ")"
    ident  := "x" | "y" "'"* | "y^(" integer ")" | letter ident-tail

Derivative notation ``y'``, ``y''`` and ``y^(k)`` maps onto the jet
variables ``y1``, ``y2``, ``yk``.  In system mode the unknowns are written
``y1``, ``y2``, ... and their derivatives ``y1'``, ``y1^(2)`` and so on.
Function calls are rejected: the engine is purely rational.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError
from .expr import Expr, indeterminate_name, jet_name, system_jet_name

MAX_PRIMES = 12


@dataclass(frozen=True)
class ParseContext:
    """Which identifiers are legal.

    ``params`` lists free parameters; ``None`` accepts any identifier as a
    parameter.  ``system`` switches ``y<i>`` from jet coordinates to system
    unknowns.
    """

    params: frozenset[str] | None = field(default_factory=frozenset)
    system: bool = False
    allow_indeterminates: bool = True


@dataclass
class _Tok:
    kind: str  # "num", "id", "op", "end"
    text: str
    line: int
    col: int
    value: object = None


class _Lexer:
    def __init__(self, text: str, ctx: ParseContext):
        self.text = text
        self.ctx = ctx
        self.pos = 0
        self.line = 1
        self.col = 1

    def _error(self, msg, line=None, col=None):
        raise ParseError(msg, line or self.line, col or self.col)

    def _advance(self, n=1):
        for _ in range(n):
            if self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _peek(self, off=0):
        i = self.pos + off
        return self.text[i] if i < len(self.text) else ""

    def _read_int(self) -> str:
        start = self.pos
        while self._peek().isdigit():
            self._advance()
        return self.text[start : self.pos]

    def _derivative_suffix(self, line, col) -> int:
        """Primes or ``^(k)`` after a function symbol; returns the order."""
        if self._peek() == "'":
            k = 0
            while self._peek() == "'":
                self._advance()
                k += 1
            if k > MAX_PRIMES:
                self._error(f"more than {MAX_PRIMES} primes; write y^({k}) instead", line, col)
            return k
        if self._peek() == "^" and self._peek(1) == "(":
            save = (self.pos, self.line, self.col)
            self._advance(2)
            while self._peek().isspace():
                self._advance()
            digits = self._read_int()
            while self._peek().isspace():
                self._advance()
            if digits and self._peek() == ")":
                self._advance()
                return int(digits)
            self.pos, self.line, self.col = save
        return 0

    def tokens(self) -> list[_Tok]:
        out = []
        while True:
            while self._peek().isspace():
                self._advance()
            line, col = self.line, self.col
            c = self._peek()
            if not c:
                out.append(_Tok("end", "", line, col))
                return out
            if c.isdigit():
                digits = self._read_int()
                if self._peek() == ".":
                    self._error("decimal literals are not supported; use integer/integer", line, col)
                out.append(_Tok("num", digits, line, col, int(digits)))
            elif c.isalpha() or c == "_":
                start = self.pos
                while self._peek().isalnum() or self._peek() == "_":
                    self._advance()
                word = self.text[start : self.pos]
                out.append(self._identifier(word, line, col))
            elif c in "+-*/^()=":
                self._advance()
                out.append(_Tok("op", c, line, col))
            else:
                self._error(f"unexpected character {c!r}", line, col)

    def _identifier(self, word: str, line: int, col: int) -> _Tok:
        ctx = self.ctx
        if word == "x":
            return _Tok("id", word, line, col, "x")
        if self.ctx.system:
            if word.startswith("y") and word[1:].isdigit() and int(word[1:]) >= 1:
                k = self._derivative_suffix(line, col)
                return _Tok("id", word, line, col, system_jet_name(int(word[1:]), k))
        elif word == "y":
            k = self._derivative_suffix(line, col)
            return _Tok("id", word, line, col, jet_name(k))
        elif word.startswith("y") and word[1:].isdigit():
            return _Tok("id", word, line, col, jet_name(int(word[1:])))
        if ctx.allow_indeterminates and word.startswith("p") and word[1:].isdigit():
            k = self._derivative_suffix(line, col)
            return _Tok("id", word, line, col, indeterminate_name(int(word[1:]), k))
        j = self.pos
        while j < len(self.text) and self.text[j].isspace():
            j += 1
        if j < len(self.text) and self.text[j] == "(":
            raise ParseError(f"function calls such as {word}(...) are not supported (rational expressions only)", line, col)
        if ctx.params is not None and word not in ctx.params:
            raise ParseError(f"unknown variable {word!r}", line, col)
        return _Tok("id", word, line, col, word)


class _Parser:
    def __init__(self, tokens: list[_Tok]):
        self.toks = tokens
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def _take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def _expect(self, text):
        tok = self.cur
        if tok.kind != "op" or tok.text != text:
            found = tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", tok.line, tok.col)
        return self._take()

    def expr(self) -> Expr:
        value = self.term()
        while self.cur.kind == "op" and self.cur.text in "+-":
            op = self._take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Expr:
        value = self.factor()
        while self.cur.kind == "op" and self.cur.text in "*/":
            tok = self._take()
            rhs = self.factor()
            if tok.text == "*":
                value = value * rhs
            else:
                if rhs.is_zero:
                    raise ParseError("division by zero", tok.line, tok.col)
                value = value / rhs
        return value

    def factor(self) -> Expr:
        if self.cur.kind == "op" and self.cur.text in "+-":
            op = self._take().text
            inner = self.factor()
            return -inner if op == "-" else inner
        value = self.base()
        while self.cur.kind == "op" and self.cur.text == "^":
            tok = self._take()
            e = self._exponent(tok)
            if e == 0 and value.is_zero:
                raise ParseError("0^0 is undefined", tok.line, tok.col)
            value = value**e
        return value

    def _exponent(self, caret: _Tok) -> int:
        tok = self.cur
        if tok.kind == "num":
            return self._take().value
        if tok.kind == "op" and tok.text == "(":
            self._take()
            if self.cur.kind == "op" and self.cur.text == "-":
                raise ParseError("negative exponents are not allowed", self.cur.line, self.cur.col)
            if self.cur.kind != "num":
                raise ParseError("exponent must be a non-negative integer", self.cur.line, self.cur.col)
            e = self._take().value
            self._expect(")")
            return e
        if tok.kind == "op" and tok.text == "-":
            raise ParseError("negative exponents are not allowed", tok.line, tok.col)
        raise ParseError("exponent must be a non-negative integer", tok.line, tok.col)

    def base(self) -> Expr:
        tok = self.cur
        if tok.kind == "num":
            self._take()
            return Expr.const(Fraction(tok.value))
        if tok.kind == "id":
            self._take()
            return Expr.var(tok.value)
        if tok.kind == "op" and tok.text == "(":
            self._take()
            inner = self.expr()
            self._expect(")")
            return inner
        found = tok.text or "end of input"
        raise ParseError(f"unexpected {found!r}", tok.line, tok.col)


def _tokens(text: str, context: ParseContext | None) -> list[_Tok]:
    return _Lexer(text, context or ParseContext()).tokens()


def parse(text: str, context: ParseContext | None = None) -> Expr:
    """Parse an expression and return its normal form."""
    p = _Parser(_tokens(text, context))
    value = p.expr()
    if p.cur.kind != "end":
        raise ParseError(f"unexpected {p.cur.text!r}", p.cur.line, p.cur.col)
    return value


def parse_relation(text: str, context: ParseContext | None = None) -> tuple[Expr, Expr, tuple[int, int]]:
    """Parse ``lhs = rhs``; also returns the position of the left-hand side."""
    toks = _tokens(text, context)
    eqs = [i for i, t in enumerate(toks) if t.kind == "op" and t.text == "="]
    if len(eqs) != 1:
        tok = toks[eqs[1]] if len(eqs) > 1 else toks[-1]
        raise ParseError("an equation needs exactly one '='", tok.line, tok.col)
    k = eqs[0]
    left = toks[:k] + [_Tok("end", "", toks[k].line, toks[k].col)]
    right = toks[k + 1 :]
    sides = []
    for part in (left, right):
        p = _Parser(part)
        if p.cur.kind == "end":
            raise ParseError("empty side of an equation", p.cur.line, p.cur.col)
        value = p.expr()
        if p.cur.kind != "end":
            raise ParseError(f"unexpected {p.cur.text!r}", p.cur.line, p.cur.col)
        sides.append(value)
    return sides[0], sides[1], (toks[0].line, toks[0].col)
