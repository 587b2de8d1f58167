"""Concrete syntax: parsing, rendering and the P(.) translation.

Grammar (one formula per file, ``#`` starts a line comment)::

    formula := quant* impl
    quant   := ("exists" | "forall") ident ("," ident)* "."
    impl    := disj ("->" impl)?
    disj    := conj ("||" conj)*
    conj    := unary ("&&" unary)*
    unary   := "!" unary | quant formula | atom | "(" formula ")"
    atom    := term rel term | int "|" term | "P(" term ")" | "true" | "false"
    term    := ["-"] mono (("+" | "-") mono)*
    mono    := int | int "*" base | base
    base    := ident | "pow(" ident ")" | "abs(" ident ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import ParseError
from .formula import (
    EXISTS,
    FALSE,
    TRUE,
    And,
    Dvd,
    Exists,
    Forall,
    Formula,
    Lt,
    NameSupply,
    Not,
    Or,
    PowerPred,
    PrenexFormula,
    all_vars,
    conj,
    disj,
    dvd,
    equal,
    exists,
    forall,
    geq,
    greater,
    implies,
    leq,
    less,
    map_atoms,
    neg,
    not_equal,
    power_pred,
    to_prenex,
)
from .term import Term, render_term


class Dialect(Enum):
    PRESEXP = "presexp"
    PRESPOWER = "prespower"

    @classmethod
    def parse(cls, name) -> "Dialect":
        if isinstance(name, Dialect):
            return name
        return cls(name.lower())


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>->|&&|\|\||<=|>=|!=|==|[<>=!|()+\-*.,])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"exists", "forall", "true", "false"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    out: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            out.append(_Tok(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - line_start + 1))
    return out


_RELATIONS = {
    "<": less,
    "<=": leq,
    ">": greater,
    ">=": geq,
    "=": equal,
    "==": equal,
    "!=": not_equal,
}


class _Parser:
    def __init__(self, text: str, dialect: Dialect):
        self.toks = _tokenize(text)
        self.i = 0
        self.dialect = dialect

    # helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "ident") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        tok = self.tok
        if not self.accept(text):
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return tok

    def ident(self) -> str:
        tok = self.tok
        if tok.kind != "ident" or tok.text in _KEYWORDS:
            self.error(f"expected a variable name, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok.text

    # grammar
    def parse(self) -> Formula:
        f = self.formula()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")
        return f

    def formula(self) -> Formula:
        return self.impl()

    def impl(self) -> Formula:
        left = self.disj()
        if self.accept("->"):
            return implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.accept("||"):
            parts.append(self.conj())
        return disj(*parts) if len(parts) > 1 else parts[0]

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.accept("&&"):
            parts.append(self.unary())
        return conj(*parts) if len(parts) > 1 else parts[0]

    def unary(self) -> Formula:
        tok = self.tok
        if self.accept("!"):
            return neg(self.unary())
        if tok.kind == "ident" and tok.text in ("exists", "forall"):
            self.i += 1
            names = [self.ident()]
            while self.accept(","):
                names.append(self.ident())
            self.expect(".")
            body = self.formula()
            for v in reversed(names):
                body = exists(v, body) if tok.text == "exists" else forall(v, body)
            return body
        if tok.kind == "ident" and tok.text == "true":
            self.i += 1
            return TRUE
        if tok.kind == "ident" and tok.text == "false":
            self.i += 1
            return FALSE
        if tok.kind == "op" and tok.text == "(":
            return self.paren()
        if tok.kind == "ident" and tok.text == "P" and self.peek().text == "(":
            if self.dialect is not Dialect.PRESPOWER:
                self.error("the predicate P(.) is only available in the prespower dialect")
            self.i += 2
            t = self.term()
            self.expect(")")
            return power_pred(t)
        if tok.kind == "int" and self.peek().kind == "op" and self.peek().text == "|":
            q = int(tok.text)
            if q < 1:
                self.error("divisibility modulus must be at least 1")
            self.i += 2
            return dvd(q, self.term())
        return self.comparison()

    def paren(self) -> Formula:
        # "(" may open a formula or, rarely, a parenthesised term; try formula first
        start = self.i
        self.i += 1
        try:
            f = self.formula()
            self.expect(")")
            return f
        except ParseError as first:
            self.i = start
            try:
                return self.comparison()
            except ParseError:
                raise first from None

    def comparison(self) -> Formula:
        left = self.term()
        tok = self.tok
        rel = _RELATIONS.get(tok.text) if tok.kind == "op" else None
        if rel is None:
            self.error(f"expected a comparison operator, found {tok.text or 'end of input'!r}")
        self.i += 1
        right = self.term()
        return rel(left, right)

    def term(self) -> Term:
        sign = 1
        if self.accept("-"):
            sign = -1
        elif self.accept("+"):
            pass
        total = self.mono() * sign
        while True:
            if self.accept("+"):
                total = total + self.mono()
            elif self.accept("-"):
                total = total - self.mono()
            else:
                return total

    def mono(self) -> Term:
        tok = self.tok
        if tok.kind == "op" and tok.text == "-":
            self.i += 1
            return -self.mono()
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        if tok.kind == "int":
            self.i += 1
            n = int(tok.text)
            if self.accept("*"):
                return self.mono() * n
            return Term.constant(n)
        return self.base()

    def base(self) -> Term:
        tok = self.tok
        if tok.kind == "ident" and tok.text in ("pow", "abs") and self.peek().text == "(":
            if tok.text == "pow" and self.dialect is not Dialect.PRESEXP:
                self.error("pow(.) is only available in the presexp dialect")
            self.i += 2
            arg = self.tok
            if arg.kind == "int":
                self.i += 1
                n = int(arg.text)
                val = (1 << n) if tok.text == "pow" else n
                self.expect(")")
                return Term.constant(val)
            if self.accept("-") and self.tok.kind == "int":
                n = int(self.tok.text)
                self.i += 1
                self.expect(")")
                return Term.constant((1 << n) if tok.text == "pow" else n)
            name = self.ident()
            self.expect(")")
            return Term.power(name) if tok.text == "pow" else Term.absolute(name)
        name = self.ident()
        if self.accept("*"):
            tok2 = self.tok
            if tok2.kind != "int":
                self.error("non-linear product of two variables")
            self.i += 1
            return Term.var(name, int(tok2.text))
        return Term.var(name)


def parse(text: str, dialect: Dialect | str = Dialect.PRESEXP) -> Formula:
    """Parse one formula.  Terms come out normalized."""
    return _Parser(text, Dialect.parse(dialect)).parse()


def parse_file(path, dialect: Dialect | str = Dialect.PRESEXP) -> Formula:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), dialect)


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def render(f: Formula) -> str:
    if f is TRUE:
        return "true"
    if f is FALSE:
        return "false"
    if isinstance(f, Lt):
        return f"{render_term(f.term)} < 0"
    if isinstance(f, Dvd):
        return f"{f.q} | {render_term(f.term)}"
    if isinstance(f, PowerPred):
        return f"P({render_term(f.term)})"
    if isinstance(f, Not):
        return f"!{_wrap(f.arg)}"
    if isinstance(f, And):
        return " && ".join(_wrap(a) for a in f.args)
    if isinstance(f, Or):
        return " || ".join(_wrap(a) for a in f.args)
    if isinstance(f, (Exists, Forall)):
        kind = "exists" if isinstance(f, Exists) else "forall"
        return f"{kind} {f.var}. {render(f.body)}"
    raise TypeError(f)


def _wrap(f: Formula) -> str:
    if f is TRUE or f is FALSE or isinstance(f, PowerPred):
        return render(f)
    return f"({render(f)})"


def render_prenex(p: PrenexFormula) -> str:
    head = "".join(f"{'exists' if k == EXISTS else 'forall'} {v}. " for k, v in p.prefix)
    return head + render(p.matrix)


# ---------------------------------------------------------------------------
# P(.) and divisibility translation
# ---------------------------------------------------------------------------


def translate_pres_power(f: Formula, names: NameSupply | None = None) -> PrenexFormula:
    """Rewrite P(t) as exists y. t = 2^|y| and q | t as exists z. t = q*z, then prenex."""
    if names is None:
        names = NameSupply(all_vars(f))

    def fn(a: Formula) -> Formula:
        if isinstance(a, PowerPred):
            y = names.fresh("p")
            return Exists(y, equal(a.term, Term.power(y)))
        if isinstance(a, Dvd):
            z = names.fresh("d")
            return Exists(z, equal(a.term, Term.var(z, a.q)))
        return a

    return to_prenex(map_atoms(f, fn), names)
