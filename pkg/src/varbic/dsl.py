"""Tiny language for vector fields and potentials.

    vec NAME [poly, poly, ...]     concrete field over x1..xn (one poly per component)
    formal NAME                    formal field with symbolic jets d_C NAME^a

Polynomials use integer literals, division by integer literals (``-2/5``,
``x1^2/2``), variables, ``+ - * ^`` and parentheses.  Statements are separated by newlines or ``;``; ``#`` starts
a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "DSLError",
    "Polynomial",
    "FieldSpec",
    "parse_program",
    "parse_vector_field",
    "parse_polynomial",
]


class DSLError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


Polynomial = dict  # exponent tuple -> Fraction


@dataclass(frozen=True)
class FieldSpec:
    name: str
    formal: bool
    components: tuple = ()  # tuple of Polynomial (concrete only)


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>[\n;])
  | (?P<float>\d+\.\d*|\.\d+|\d+[eE][+-]?\d+)
  | (?P<rat>\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),\[\]])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    pos, line, col0 = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - col0 + 1
        if not m:
            raise DSLError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "float":
            raise DSLError(f"non-rational literal {chunk!r} (write fractions as p/q)", line, col)
        if kind == "nl":
            toks.append(_Tok("nl", chunk, line, col))
            if chunk == "\n":
                line += 1
                col0 = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, chunk, line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, len(text) - col0 + 1))
    return toks


class _Parser:
    def __init__(self, text: str, variables: list[str]):
        self.toks = _lex(text)
        self.i = 0
        self.vars = {v: k for k, v in enumerate(variables)}
        self.nvars = len(variables)

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.cur
        raise DSLError(msg, tok.line, tok.col)

    def eat(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.cur
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            got = tok.text or "end of input"
            self.error(f"expected {want!r}, got {got!r}")
        self.i += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        return self.cur.kind == kind and (text is None or self.cur.text == text)

    # polynomial arithmetic on dicts
    def _const(self, c: Fraction) -> Polynomial:
        return {(0,) * self.nvars: c} if c else {}

    @staticmethod
    def _add(p: Polynomial, q: Polynomial, sign: int = 1) -> Polynomial:
        out = dict(p)
        for k, v in q.items():
            out[k] = out.get(k, 0) + sign * v
            if not out[k]:
                del out[k]
        return out

    @staticmethod
    def _mul(p: Polynomial, q: Polynomial) -> Polynomial:
        out: dict = {}
        for k1, v1 in p.items():
            for k2, v2 in q.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
                if not out[k]:
                    del out[k]
        return out

    def poly(self) -> Polynomial:
        out = self.term()
        while self.at("op", "+") or self.at("op", "-"):
            sign = 1 if self.eat("op").text == "+" else -1
            out = self._add(out, self.term(), sign)
        return out

    def term(self) -> Polynomial:
        out = self.unary()
        while self.at("op", "*") or self.at("op", "/"):
            if self.eat("op").text == "*":
                out = self._mul(out, self.unary())
                continue
            tok = self.cur
            if tok.kind != "rat":
                self.error("division is only allowed by an integer literal")
            self.i += 1
            if int(tok.text) == 0:
                self.error("division by zero", tok)
            out = self._mul(out, self._const(Fraction(1, int(tok.text))))
        return out

    def unary(self) -> Polynomial:
        if self.at("op", "-"):
            self.eat("op")
            return self._add({}, self.unary(), -1)
        if self.at("op", "+"):
            self.eat("op")
            return self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.at("op", "^"):
            self.eat("op")
            tok = self.cur
            if tok.kind != "rat":
                self.error("exponent must be a non-negative integer")
            self.i += 1
            out = self._const(Fraction(1))
            for _ in range(int(tok.text)):
                out = self._mul(out, base)
            return out
        return base

    def atom(self) -> Polynomial:
        tok = self.cur
        if tok.kind == "rat":
            self.i += 1
            return self._const(Fraction(int(tok.text)))
        if tok.kind == "name":
            if tok.text not in self.vars:
                allowed = ", ".join(self.vars) or "none"
                self.error(f"unknown variable {tok.text!r} (allowed: {allowed})")
            self.i += 1
            exps = [0] * self.nvars
            exps[self.vars[tok.text]] = 1
            return {tuple(exps): Fraction(1)}
        if self.at("op", "("):
            self.eat("op")
            out = self.poly()
            self.eat("op", ")")
            return out
        self.error(f"expected a number, variable or '(', got {tok.text or 'end of input'!r}")

    def statement(self, n: int) -> FieldSpec:
        kw = self.eat("name")
        if kw.text == "formal":
            name = self.eat("name").text
            return FieldSpec(name, True)
        if kw.text != "vec":
            self.error(f"expected 'vec' or 'formal', got {kw.text!r}", kw)
        name = self.eat("name").text
        open_tok = self.eat("op", "[")
        comps = [self.poly()]
        while self.at("op", ","):
            self.eat("op")
            comps.append(self.poly())
        self.eat("op", "]")
        if len(comps) != n:
            self.error(f"field {name!r} has {len(comps)} components but the dimension is {n}", open_tok)
        return FieldSpec(name, False, tuple(comps))

    def program(self, n: int) -> list[FieldSpec]:
        out = []
        while True:
            while self.at("nl"):
                self.eat("nl")
            if self.at("eof"):
                break
            out.append(self.statement(n))
            if not self.at("eof"):
                self.eat("nl")
        return out


def parse_program(text: str, n: int) -> list[FieldSpec]:
    """Parse one or more field statements over base coordinates ``x1..xn``."""
    p = _Parser(text, [f"x{a}" for a in range(1, n + 1)])
    specs = p.program(n)
    seen = set()
    for s in specs:
        if s.name in seen:
            raise DSLError(f"field {s.name!r} defined twice")
        seen.add(s.name)
    return specs


def parse_vector_field(text: str, n: int) -> FieldSpec:
    specs = parse_program(text, n)
    if len(specs) != 1:
        raise DSLError(f"expected exactly one field definition, got {len(specs)}")
    return specs[0]


def parse_polynomial(text: str, variables: list[str]) -> Polynomial:
    p = _Parser(text, variables)
    out = p.poly()
    if not p.at("eof"):
        p.error(f"unexpected {p.cur.text!r} after expression")
    return out


def polynomial_to_text(poly: Polynomial, variables: list[str]) -> str:
    if not poly:
        return "0"
    parts = []
    for exps in sorted(poly, reverse=True):
        c = poly[exps]
        factors = [v if e == 1 else f"{v}^{e}" for v, e in zip(variables, exps) if e]
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(factors))
        elif c == -1:
            parts.append("-" + "*".join(factors))
        else:
            parts.append(f"{c}*" + "*".join(factors))
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out
