"""Text grammar for scalars and polynomials in ``x[1..r]`` and ``y``.

::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | "+" unary | power
    power  := atom ("^" exponent)?
    exponent := INT | "(" ("-" | "+")? INT ")"
    atom   := INT ("/" INT)? | SYMBOL | "x[" INT "]" | "y" | "(" expr ")"

Symbols are identifiers other than ``x`` and ``y``, optionally followed by a
subscript ``_{i,j,...}`` (signed integers) or ``_word``; e.g. ``a_{0,0,2}``,
``c_{-1,2}``, ``C_{0,1}``.  The canonical renderers produce text in this
grammar, so ``parse(render(p)) == p``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .core import multiindex as mi
from .core.polynomial import XYPolynomial
from .core.scalar import Scalar, SymPoly, normalize


class ParseError(ValueError):
    """Malformed expression; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<float>\d+\.\d*|\.\d+)
  | (?P<int>\d+)
  | (?P<xvar>x\[\s*(?P<xidx>\d+)\s*\])
  | (?P<sym>[A-Za-z][A-Za-z0-9]*(?:_(?:\{\s*-?\d+(?:\s*,\s*-?\d+)*\s*\}|[A-Za-z0-9]+))?)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "xidx":
            kind = "xvar"
        if kind == "float":
            raise ParseError("floating-point literals are not exact scalars; use p/q", pos)
        if kind == "xvar":
            out.append(Token("xvar", m.group("xidx"), pos))
        elif kind == "sym":
            name = m.group("sym")
            if name == "y":
                out.append(Token("y", name, pos))
            elif name == "x":
                raise ParseError("variable x needs an index, as in x[1]", pos)
            else:
                out.append(Token("sym", re.sub(r"\s+", "", name), pos))
        elif kind != "ws":
            out.append(Token(kind, m.group(kind), pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


def _const(r: int, c: Scalar) -> XYPolynomial:
    return XYPolynomial(r, {((0,) * r, 0): c})


def _pow(a: XYPolynomial, e: int, pos: int) -> XYPolynomial:
    r = a.r
    if e >= 0:
        out = _const(r, 1)
        for _ in range(e):
            out = out * a
        return out
    if len(a) != 1:
        raise ParseError("negative powers are only defined for monomials", pos)
    ((i, j), c), = a.items()
    if j:
        raise ParseError("negative powers of y are not polynomial", pos)
    if isinstance(c, SymPoly) and len(c.terms) != 1:
        raise ParseError("negative powers are only defined for monomials", pos)
    inv = c ** e if isinstance(c, SymPoly) else normalize(Fraction(c) ** e)
    return XYPolynomial(r, {(tuple(t * e for t in i), 0): inv})


class _Parser:
    def __init__(self, text: str, r: int | None = None):
        self.text = text
        self.toks = tokenize(text)
        self.p = 0
        needed = max((int(t.text) for t in self.toks if t.kind == "xvar"), default=0)
        if r is None:
            r = max(needed, 1)
        elif needed > r:
            raise mi.DimensionMismatch(f"expression uses x[{needed}] but r = {r}")
        self.r = r

    def peek(self) -> Token:
        return self.toks[self.p]

    def take(self, kind: str | None = None, text: str | None = None) -> Token:
        t = self.toks[self.p]
        if (kind and t.kind != kind) or (text is not None and t.text != text):
            want = text or kind
            got = t.text or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", t.pos)
        self.p += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text == text

    def expr(self) -> XYPolynomial:
        acc = self.term()
        while self.at("+") or self.at("-"):
            sign = 1 if self.take().text == "+" else -1
            t = self.term()
            acc = acc + t if sign == 1 else acc - t
        return acc

    def term(self) -> XYPolynomial:
        acc = self.unary()
        while self.at("*"):
            self.take()
            acc = acc * self.unary()
        return acc

    def unary(self) -> XYPolynomial:
        if self.at("-"):
            self.take()
            return -self.unary()
        if self.at("+"):
            self.take()
            return self.unary()
        return self.power()

    def exponent(self) -> int:
        if self.at("("):
            self.take()
            sign = 1
            if self.at("-") or self.at("+"):
                sign = -1 if self.take().text == "-" else 1
            v = int(self.take("int").text)
            self.take("op", ")")
            return sign * v
        return int(self.take("int").text)

    def power(self) -> XYPolynomial:
        start = self.peek().pos
        base = self.atom()
        if self.at("^"):
            self.take()
            pos = self.peek().pos
            e = self.exponent()
            return _pow(base, e, pos if e >= 0 else start)
        return base

    def atom(self) -> XYPolynomial:
        t = self.peek()
        if t.kind == "int":
            self.take()
            v: Scalar = int(t.text)
            if self.at("/"):
                self.take()
                d = self.take("int")
                if int(d.text) == 0:
                    raise ParseError("division by zero", d.pos)
                v = normalize(Fraction(int(t.text), int(d.text)))
            return _const(self.r, v)
        if t.kind == "sym":
            self.take()
            return _const(self.r, SymPoly.symbol(t.text))
        if t.kind == "xvar":
            self.take()
            k = int(t.text)
            if k < 1:
                raise ParseError("x indices start at 1", t.pos)
            return XYPolynomial(self.r, {(mi.unit(self.r, k), 0): 1})
        if t.kind == "y":
            self.take()
            return XYPolynomial.y(self.r)
        if self.at("("):
            self.take()
            v = self.expr()
            self.take("op", ")")
            return v
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.pos)

    def parse(self) -> XYPolynomial:
        v = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected {t.text!r}", t.pos)
        return v


def parse_polynomial(text: str, r: int | None = None) -> XYPolynomial:
    """Parse ``text`` into an :class:`XYPolynomial` in ``x[1..r]`` and ``y``.

    ``r`` defaults to the largest x index that occurs (at least 1).
    """
    return _Parser(text, r).parse()


def parse_scalar(text: str) -> Scalar:
    """Parse an expression free of ``x`` and ``y`` into a scalar."""
    p = _Parser(text, 1)
    v = p.parse()
    total: Scalar = 0
    for (i, j), c in v.items():
        if j or any(i):
            raise ParseError("a scalar may not involve x or y", 0)
        total = total + c
    return normalize(total)
