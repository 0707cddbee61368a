"""Textual syntax for differential operators.

Grammar (whitespace insensitive, explicit ``*`` required)::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := primary ('^' uint)? | '-' factor
    primary:= atom | '(' expr ')'
    atom   := rational | var | deriv

``^`` binds tighter than unary minus, which binds tighter than ``*``.
Products are never reordered: ``Dx*x`` is x*Dx + 1.  Variables are x, y, z
with derivatives Dx, Dy, Dz for d <= 3; x1..xd and D1..Dd work for any d.
Rationals are written ``3`` or ``3/4``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .exactcore import Poly, grlex_key, rat_to_json
from .weylops import DOp, compose

__all__ = [
    "ParseError",
    "Num", "Var", "Deriv", "Neg", "Add", "Sub", "Mul", "Pow",
    "parse",
    "lower",
    "parse_op",
    "print_op",
    "var_names",
]


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, src: str = ""):
        self.pos = pos
        self.src = src
        super().__init__(f"{msg} at position {pos}" + (f"\n  {src}\n  {' ' * pos}^" if src else ""))


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Deriv:
    index: int


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


def var_names(d: int) -> tuple[list[str], list[str]]:
    if d <= 3:
        v = ["x", "y", "z"][:d]
        return v, ["D" + n for n in v]
    return [f"x{i + 1}" for i in range(d)], [f"D{i + 1}" for i in range(d)]


def _symbols(d: int) -> dict:
    table = {}
    v, dv = var_names(d)
    for i in range(d):
        table[v[i]] = Var(i)
        table[dv[i]] = Deriv(i)
        table[f"x{i + 1}"] = Var(i)
        table[f"D{i + 1}"] = Deriv(i)
    return table


_NUM = re.compile(r"\d+(?:/\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(src):
        ch = src[pos]
        if ch.isspace():
            pos += 1
            continue
        m = _NUM.match(src, pos)
        if m:
            out.append(("num", m.group(), pos))
            pos = m.end()
            continue
        m = _NAME.match(src, pos)
        if m:
            out.append(("name", m.group(), pos))
            pos = m.end()
            continue
        if ch not in "+-*^()":
            raise ParseError(f"unexpected character {ch!r}", pos, src)
        out.append(("op", ch, pos))
        pos += 1
    out.append(("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src: str, d: int):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0
        self.syms = _symbols(d)
        self.d = d

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, tok[2], self.src)

    def expect(self, val):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != val:
            raise self.error(f"expected {val!r}, found {tok[1] or 'end of input'!r}")
        return self.take()

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            node = Mul(node, self.factor())
        return node

    def factor(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Neg(self.factor())
        base = self.primary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "num" or "/" in tok[1]:
                raise self.error("exponent must be a non-negative integer")
            self.take()
            return Pow(base, int(tok[1]))
        return base

    def primary(self):
        tok = self.peek()
        if tok[0] == "num":
            self.take()
            return Num(Fraction(tok[1]))
        if tok[0] == "name":
            if tok[1] not in self.syms:
                raise self.error(f"unknown symbol {tok[1]!r} for dimension {self.d}")
            self.take()
            return self.syms[tok[1]]
        if tok[0] == "op" and tok[1] == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        raise self.error(f"unexpected {tok[1] or 'end of input'!r}")


def parse(src: str, d: int):
    if d < 1:
        raise ValueError("dimension must be >= 1")
    p = _Parser(src, d)
    node = p.expr()
    if p.peek()[0] != "end":
        raise p.error(f"unexpected {p.peek()[1]!r}")
    return node


def lower(e, d: int) -> DOp:
    if isinstance(e, Num):
        return DOp.scalar(e.value, d)
    if isinstance(e, Var):
        return DOp.var(e.index, d)
    if isinstance(e, Deriv):
        return DOp.partial(e.index, d)
    if isinstance(e, Neg):
        return -lower(e.arg, d)
    if isinstance(e, Add):
        return lower(e.left, d) + lower(e.right, d)
    if isinstance(e, Sub):
        return lower(e.left, d) - lower(e.right, d)
    if isinstance(e, Mul):
        return compose(lower(e.left, d), lower(e.right, d))
    if isinstance(e, Pow):
        return lower(e.base, d) ** e.exp
    raise TypeError(f"not an operator expression: {e!r}")


def parse_op(src: str, d: int) -> DOp:
    return lower(parse(src, d), d)


def _factors(exp, names):
    return [n if k == 1 else f"{n}^{k}" for n, k in zip(names, exp) if k]


def print_op(op: DOp) -> str:
    """Canonical text; highest derivative first, then highest monomial."""
    if not op.terms:
        return "0"
    xs, ds = var_names(op.dim)
    parts = []
    for alpha, c in sorted(op.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True):
        dpart = _factors(alpha, ds)
        for e, v in sorted(c.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True):
            factors = _factors(e, xs) + dpart
            mag = abs(v)
            if mag != 1 or not factors:
                factors.insert(0, rat_to_json(mag))
            parts.append(("-" if v < 0 else "+", "*".join(factors)))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def print_poly(p: Poly) -> str:
    return p.to_text(var_names(p.dim)[0])
