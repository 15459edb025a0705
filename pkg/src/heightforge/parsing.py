"""Recursive-descent parser for polynomials, field elements, vectors and matrices.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary | <implicit product>)*
    unary  := ('+' | '-') unary | power
    power  := atom (('^' | '**') INT)?
    atom   := NUMBER | NAME | '(' expr ')'
    list   := '[' (item (',' item)*)? ']'

Numbers may be integers or decimals and are read exactly.  Division is only
allowed by nonzero constants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError
from .exact import Poly
from .field import FieldElement, NumberField, rational_field
from .functionals import HomogeneousPoly

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()\[\],]))")


@dataclass
class _Tok:
    kind: str  # "num", "name", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", text, bad)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(_Tok("num", m.group(1), start))
        elif m.group(2):
            out.append(_Tok("name", m.group(2), start))
        else:
            out.append(_Tok("op", m.group(3), start))
        pos = m.end()
    out.append(_Tok("end", "", len(text)))
    return out


# sparse polynomials: dict from exponent tuple to Fraction


def _add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + sign * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            v = out.get(e, 0) + c1 * c2
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


class _Parser:
    def __init__(self, text: str, variables: dict[str, int], nvars: int):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.variables = variables
        self.nvars = nvars

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ParseError(message, self.text, tok.pos)

    def eat(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str):
        if not self.eat(op):
            found = self.tok.text or "end of input"
            self.error(f"expected {op!r}, found {found!r}")

    def const(self, c) -> dict:
        return {(0,) * self.nvars: Fraction(c)} if c else {}

    def expr(self) -> dict:
        out = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            sign = 1 if self.tok.text == "+" else -1
            self.i += 1
            out = _add(out, self.term(), sign)
        return out

    def _starts_factor(self) -> bool:
        t = self.tok
        return t.kind in ("num", "name") or (t.kind == "op" and t.text == "(")

    def term(self) -> dict:
        out = self.unary()
        while True:
            if self.eat("*"):
                out = _mul(out, self.unary())
            elif self.tok.kind == "op" and self.tok.text == "/":
                tok = self.tok
                self.i += 1
                d = self.unary()
                if not d:
                    self.error("division by zero", tok)
                if set(d) != {(0,) * self.nvars}:
                    self.error("division is only allowed by constants", tok)
                out = _mul(out, self.const(1 / d[(0,) * self.nvars]))
            elif self._starts_factor():
                out = _mul(out, self.power())
            else:
                return out

    def unary(self) -> dict:
        if self.eat("-"):
            return _mul(self.const(-1), self.unary())
        if self.eat("+"):
            return self.unary()
        return self.power()

    def power(self) -> dict:
        base = self.atom()
        if self.eat("^") or self.eat("**"):
            tok = self.tok
            if tok.kind != "num" or not tok.text.isdigit():
                self.error("exponent must be a non-negative integer")
            self.i += 1
            out = self.const(1)
            for _ in range(int(tok.text)):
                out = _mul(out, base)
            return out
        return base

    def atom(self) -> dict:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return self.const(Fraction(tok.text))
        if tok.kind == "name":
            if tok.text not in self.variables:
                allowed = ", ".join(sorted(self.variables)) or "none"
                self.error(f"unknown symbol {tok.text!r} (allowed: {allowed})")
            self.i += 1
            e = [0] * self.nvars
            e[self.variables[tok.text]] = 1
            return {tuple(e): Fraction(1)}
        if self.eat("("):
            out = self.expr()
            self.expect(")")
            return out
        found = tok.text or "end of input"
        self.error(f"expected a number, symbol or '(' but found {found!r}")

    def finish(self):
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")


def _parse(text: str, variables: dict[str, int], nvars: int) -> dict:
    p = _Parser(text, variables, nvars)
    if p.tok.kind == "end":
        raise ParseError("empty expression", text, 0)
    out = p.expr()
    p.finish()
    return out


def _sparse_to_poly(d: dict) -> Poly:
    if not d:
        return Poly()
    n = max(e[0] for e in d)
    coeffs = [Fraction(0)] * (n + 1)
    for e, c in d.items():
        coeffs[e[0]] = c
    return Poly(coeffs)


def parse_univariate(text: str, var: str = "x") -> Poly:
    """A polynomial over Q in one variable."""
    return _sparse_to_poly(_parse(text, {var: 0}, 1))


def homogeneous_variables(N: int) -> dict[str, int]:
    names = {f"x{i + 1}": i for i in range(N)}
    if N <= 3:
        names.update({a: i for i, a in enumerate("xyz"[:N])})
    return names


def parse_homogeneous(text: str, N: int, M: int | None = None, field: NumberField | None = None):
    """A homogeneous form in x1..xN (or x, y, z); coefficients may use ``t`` when a field is given.

    When ``M`` is omitted the degree is read off the input.
    """
    K = field or rational_field()
    variables = homogeneous_variables(N)
    nv = N + (1 if field is not None else 0)
    if field is not None:
        variables["t"] = N
    d = _parse(text, variables, nv)
    terms: dict = {}
    for e, c in d.items():
        xe = e[:N]
        te = e[N] if field is not None else 0
        mono = [Fraction(0)] * (te + 1)
        mono[te] = c
        terms[xe] = terms.get(xe, K.zero) + K(Poly(mono))
    terms = {e: c for e, c in terms.items() if not c.is_zero()}
    degrees = {sum(e) for e in terms}
    if len(degrees) > 1:
        raise ParseError(f"polynomial is not homogeneous (degrees {sorted(degrees)})", text)
    found = degrees.pop() if degrees else (M if M is not None else 0)
    if M is not None and found != M:
        raise ParseError(f"expected a form of degree {M}, found degree {found}", text)
    return HomogeneousPoly(K, N, found, terms)


def parse_element(text: str, field: NumberField, var: str = "t") -> FieldElement:
    """A field element written as a polynomial of degree < [K:Q] in the generator."""
    f = _sparse_to_poly(_parse(text, {var: 0}, 1))
    if f.degree >= field.degree:
        raise ParseError(
            f"element has degree {f.degree} in {var}; reduce it below the field degree {field.degree}",
            text,
        )
    return field(f)


def parse_field(text: str) -> NumberField:
    """A number field from its defining polynomial in ``t`` (``x`` also accepted)."""
    names = {tok.text for tok in tokenize(text) if tok.kind == "name"}
    var = "x" if names == {"x"} else "t"
    return NumberField(parse_univariate(text, var))


def _split_list(text: str, start: int = 0) -> tuple[list[tuple[str, int]], int]:
    """Split ``[a, b, [c, d]]`` into top-level item strings and their offsets."""
    i = start
    while i < len(text) and text[i].isspace():
        i += 1
    if i >= len(text) or text[i] != "[":
        raise ParseError("expected '['", text, i)
    depth = 0
    items = []
    item_start = i + 1
    for j in range(i, len(text)):
        ch = text[j]
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
            if depth == 0:
                if text[item_start:j].strip():
                    items.append((text[item_start:j], item_start))
                elif items:
                    raise ParseError("empty list item", text, j)
                return items, j + 1
        elif ch == "," and depth == 1:
            if not text[item_start:j].strip():
                raise ParseError("empty list item", text, j)
            items.append((text[item_start:j], item_start))
            item_start = j + 1
    raise ParseError("unbalanced '['", text, i)


def _whole_list(text: str) -> list[tuple[str, int]]:
    items, end = _split_list(text)
    if text[end:].strip():
        raise ParseError("unexpected text after ']'", text, end)
    return items


def _located(fn, item: str, offset: int, text: str):
    try:
        return fn(item)
    except ParseError as exc:
        pos = exc.position
        msg = str(exc).split(" at position")[0]
        raise ParseError(msg, text, None if pos is None else pos + offset) from None


def parse_vector(text: str, field: NumberField) -> list[FieldElement]:
    """``[e1, e2, ...]`` with entries parsed as field elements."""
    return [_located(lambda s: parse_element(s, field), s, off, text) for s, off in _whole_list(text)]


def parse_matrix(text: str, field: NumberField) -> list[list[FieldElement]]:
    """``[[...], [...]]``; every row must have the same length."""
    rows = []
    for s, off in _whole_list(text):
        lead = len(s) - len(s.lstrip())
        rows.append(_located(lambda r: parse_vector(r, field), s.strip(), off + lead, text))
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ParseError("matrix rows have different lengths", text)
    return rows
