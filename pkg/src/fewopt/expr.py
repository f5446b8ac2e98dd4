"""Scalar expressions for instance files: "sqrt(363)", "108*e", "-3/4", "pi^2".

Grammar (usual precedence, left associative):

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary | implicit)*
    unary   := "-" unary | "+" unary | power
    power   := atom ("^" integer)?
    atom    := number | "e" | "pi" | "sqrt" "(" expr ")" | "(" expr ")"

`implicit` is juxtaposition of a number with a constant, a call or a
parenthesis ("108e", "2pi", "3sqrt(2)").  A number is a decimal literal with
an optional exponent part written with a digit after the "e" ("1.5e-3");
"2e" alone is 2 times e.  Rational subexpressions stay exact, everything
else is an outward rounded interval.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

from gmpy2 import mpfr

from .errors import ParseError
from .precision import DEFAULT_MANTISSA, GUARD_BITS, Interval, _contexts

Value = Union[Fraction, Interval]

_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_]+")
_INTEGER = re.compile(r"\d+(?![\d.])")


class _Parser:
    def __init__(self, text: str, bits: int):
        self.s = text
        self.i = 0
        self.bits = bits

    # -- lexing helpers --
    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def eat(self, ch: str) -> bool:
        if self.peek() == ch:
            self.i += 1
            return True
        return False

    def fail(self, msg, pos=None):
        raise ParseError(msg, self.i if pos is None else pos)

    # -- grammar --
    def parse(self) -> Value:
        if not self.s.strip():
            self.fail("empty expression")
        v = self.expr()
        if self.peek():
            self.fail(f"unexpected {self.peek()!r}")
        return v

    def expr(self) -> Value:
        v = self.term()
        while True:
            if self.eat("+"):
                v = _add(v, self.term(), self.bits)
            elif self.eat("-"):
                v = _add(v, _neg(self.term()), self.bits)
            else:
                return v

    def term(self) -> Value:
        v = self.unary()
        while True:
            c = self.peek()
            if c == "*":
                self.i += 1
                v = _mul(v, self.unary(), self.bits)
            elif c == "/":
                pos = self.i
                self.i += 1
                d = self.unary()
                if _is_zero(d):
                    self.fail("division by zero", pos)
                v = _div(v, d, self.bits)
            elif c == "(" or (c and (c.isalpha() or c == "_")):
                v = _mul(v, self.power(), self.bits)
            else:
                return v

    def unary(self) -> Value:
        if self.eat("-"):
            return _neg(self.unary())
        if self.eat("+"):
            return self.unary()
        return self.power()

    def power(self) -> Value:
        v = self.atom()
        self.peek()
        caret = self.i
        if self.eat("^"):
            self.ws()
            neg = self.eat("-")
            self.ws()
            m = _INTEGER.match(self.s, self.i)
            if not m:
                self.fail("exponent must be an integer literal")
            self.i = m.end()
            k = int(m.group())
            if neg:
                if _is_zero(v):
                    self.fail("zero to a negative power", caret)
                return _div(Fraction(1), _ipow(v, k, self.bits), self.bits)
            return _ipow(v, k, self.bits)
        return v

    def atom(self) -> Value:
        c = self.peek()
        if not c:
            self.fail("unexpected end of expression")
        if c == "(":
            self.i += 1
            v = self.expr()
            if not self.eat(")"):
                self.fail("expected ')'")
            return v
        m = _NUMBER.match(self.s, self.i)
        if m:
            self.i = m.end()
            return Fraction(m.group())
        m = _NAME.match(self.s, self.i)
        if m:
            name = m.group()
            start = self.i
            self.i = m.end()
            if name == "e":
                return _const("e", self.bits)
            if name == "pi":
                return _const("pi", self.bits)
            if name == "sqrt":
                if not self.eat("("):
                    self.fail("expected '(' after sqrt")
                v = self.expr()
                if not self.eat(")"):
                    self.fail("expected ')'")
                return _sqrt(v, self.bits, start, self)
            self.fail(f"unknown name {name!r}", start)
        self.fail(f"unexpected {c!r}")


def _const(name, bits) -> Interval:
    d, u, _ = _contexts(bits)
    if name == "e":
        return Interval(d.exp(1), u.exp(1))
    return Interval(d.const_pi(), u.const_pi())


def _iv(x: Value, bits) -> Interval:
    return x if isinstance(x, Interval) else Interval.of(x, bits)


def _is_zero(x: Value) -> bool:
    return x == 0 if isinstance(x, Fraction) else (x.lo == 0 and x.hi == 0)


def _neg(x: Value) -> Value:
    return -x if isinstance(x, Fraction) else x.neg()


def _add(a, b, bits):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return _iv(a, bits).add(_iv(b, bits), bits)


def _mul(a, b, bits):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return _iv(a, bits).mul(_iv(b, bits), bits)


def _div(a, b, bits):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    B = _iv(b, bits)
    if B.contains_zero():
        raise ParseError("divisor interval contains zero", 0)
    return _iv(a, bits).div(B, bits)


def _ipow(v, k, bits):
    if isinstance(v, Fraction):
        return v ** k
    out = Interval.of(Fraction(1), bits)
    for _ in range(k):
        out = out.mul(v, bits)
    return out


def _sqrt(v, bits, pos, parser):
    if isinstance(v, Fraction):
        if v < 0:
            parser.fail("square root of a negative number", pos)
        p, q = v.numerator, v.denominator
        rp, rq = math.isqrt(p), math.isqrt(q)
        if rp * rp == p and rq * rq == q:
            return Fraction(rp, rq)
    V = _iv(v, bits)
    if V.lo < 0:
        parser.fail("square root of a possibly negative number", pos)
    return V.sqrt(bits)


def parse_value(s: str, bits: int = DEFAULT_MANTISSA) -> Value:
    """Exact Fraction for rational input, otherwise an enclosing Interval."""
    if not isinstance(s, str):
        raise ParseError("expression must be a string", 0)
    return _Parser(s, bits + GUARD_BITS).parse()


def parse_scalar(s: str, bits: int = DEFAULT_MANTISSA):
    """Fraction when the expression is rational, else an mpfr rounded to `bits`."""
    v = parse_value(s, bits)
    if isinstance(v, Fraction):
        return v
    return mpfr(v.mid(bits + GUARD_BITS), bits)


def parse_interval(s: str, bits: int = DEFAULT_MANTISSA) -> Interval:
    return _iv(parse_value(s, bits), bits + GUARD_BITS)


def format_scalar(x) -> str:
    """Decimal string that parses back to exactly the same value."""
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, int):
        return str(x)
    x = x if isinstance(x, type(mpfr(0))) else mpfr(x, 256)
    q = Fraction(*x.as_integer_ratio())
    if q.denominator == 1:
        return str(q.numerator)
    # shortest decimal that round-trips at the value's precision
    digits = math.ceil(x.precision * math.log10(2)) + 2
    return format(x, f".{digits}g")
