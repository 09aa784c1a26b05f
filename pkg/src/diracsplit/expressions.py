"""Closed-form expression trees for potential components.

The node set is deliberately small: constants, the coordinates x0..x3,
sums, products, non-negative integer powers, sin, cos and exp.  It is
closed under partial differentiation, every node evaluates vectorized
over numpy arrays, and the coordinates appearing in a tree can be
inspected, which is what makes the longitudinal structure of a
potential statically checkable.

Inline strings in config files are parsed with a small recursive
descent grammar over the same node set; division is intentionally not
part of the grammar.
"""

from __future__ import annotations

import re

import numpy as np

from .errors import ExpressionParseError

COORD_NAMES = ("x0", "x1", "x2", "x3")


class Expression:
    """Base node. Subclasses implement diff/evaluate/coords."""

    def diff(self, coord: int) -> "Expression":
        raise NotImplementedError

    def evaluate(self, point):
        """Evaluate at a point: sequence of 4 scalars or broadcastable arrays."""
        raise NotImplementedError

    def coords(self) -> frozenset:
        raise NotImplementedError

    def is_zero(self) -> bool:
        return isinstance(self, Const) and self.value == 0.0

    def is_const(self) -> bool:
        return isinstance(self, Const)

    # operator sugar used by the builtin factories and tests
    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return add(self, mul(Const(-1.0), _coerce(other)))

    def __rsub__(self, other):
        return add(_coerce(other), mul(Const(-1.0), self))

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __neg__(self):
        return mul(Const(-1.0), self)

    def __pow__(self, k):
        return ipow(self, k)


def _coerce(v) -> Expression:
    if isinstance(v, Expression):
        return v
    return Const(float(v))


class Const(Expression):
    def __init__(self, value: float):
        self.value = float(value)

    def diff(self, coord):
        return Const(0.0)

    def evaluate(self, point):
        return self.value

    def coords(self):
        return frozenset()

    def __repr__(self):
        return f"{self.value:g}"


class Coord(Expression):
    def __init__(self, index: int):
        if index not in (0, 1, 2, 3):
            raise ValueError(f"coordinate index {index} out of range")
        self.index = index

    def diff(self, coord):
        return Const(1.0 if coord == self.index else 0.0)

    def evaluate(self, point):
        return point[self.index]

    def coords(self):
        return frozenset({self.index})

    def __repr__(self):
        return COORD_NAMES[self.index]


class Sum(Expression):
    def __init__(self, terms):
        self.terms = tuple(terms)

    def diff(self, coord):
        return add(*[t.diff(coord) for t in self.terms])

    def evaluate(self, point):
        out = self.terms[0].evaluate(point)
        for t in self.terms[1:]:
            out = out + t.evaluate(point)
        return out

    def coords(self):
        return frozenset().union(*[t.coords() for t in self.terms])

    def __repr__(self):
        return "(" + " + ".join(map(repr, self.terms)) + ")"


class Prod(Expression):
    def __init__(self, factors):
        self.factors = tuple(factors)

    def diff(self, coord):
        # product rule over all factors
        parts = []
        for i, f in enumerate(self.factors):
            df = f.diff(coord)
            if df.is_zero():
                continue
            parts.append(mul(*(list(self.factors[:i]) + [df] + list(self.factors[i + 1:]))))
        return add(*parts) if parts else Const(0.0)

    def evaluate(self, point):
        out = self.factors[0].evaluate(point)
        for f in self.factors[1:]:
            out = out * f.evaluate(point)
        return out

    def coords(self):
        return frozenset().union(*[f.coords() for f in self.factors])

    def __repr__(self):
        return "(" + " * ".join(map(repr, self.factors)) + ")"


class IPow(Expression):
    def __init__(self, base: Expression, exponent: int):
        if int(exponent) != exponent or exponent < 0:
            raise ValueError("only non-negative integer powers are supported")
        self.base = base
        self.exponent = int(exponent)

    def diff(self, coord):
        if self.exponent == 0:
            return Const(0.0)
        db = self.base.diff(coord)
        if db.is_zero():
            return Const(0.0)
        return mul(Const(float(self.exponent)), ipow(self.base, self.exponent - 1), db)

    def evaluate(self, point):
        return self.base.evaluate(point) ** self.exponent

    def coords(self):
        return self.base.coords() if self.exponent > 0 else frozenset()

    def __repr__(self):
        return f"{self.base!r}^{self.exponent}"


class _Unary(Expression):
    fname = "?"

    def __init__(self, arg: Expression):
        self.arg = arg

    def coords(self):
        return self.arg.coords()

    def __repr__(self):
        return f"{self.fname}({self.arg!r})"


class Sin(_Unary):
    fname = "sin"

    def diff(self, coord):
        da = self.arg.diff(coord)
        return Const(0.0) if da.is_zero() else mul(Cos(self.arg), da)

    def evaluate(self, point):
        return np.sin(self.arg.evaluate(point))


class Cos(_Unary):
    fname = "cos"

    def diff(self, coord):
        da = self.arg.diff(coord)
        return Const(0.0) if da.is_zero() else mul(Const(-1.0), Sin(self.arg), da)

    def evaluate(self, point):
        return np.cos(self.arg.evaluate(point))


class Exp(_Unary):
    fname = "exp"

    def diff(self, coord):
        da = self.arg.diff(coord)
        return Const(0.0) if da.is_zero() else mul(Exp(self.arg), da)

    def evaluate(self, point):
        return np.exp(self.arg.evaluate(point))


def add(*terms) -> Expression:
    """Sum with constant folding and zero elimination."""
    flat = []
    const = 0.0
    for t in terms:
        t = _coerce(t)
        if isinstance(t, Sum):
            flat.extend(t.terms)
        else:
            flat.append(t)
    kept = []
    for t in flat:
        if isinstance(t, Const):
            const += t.value
        else:
            kept.append(t)
    if const != 0.0 or not kept:
        kept.append(Const(const))
    return kept[0] if len(kept) == 1 else Sum(kept)


def mul(*factors) -> Expression:
    """Product with constant folding and zero shortcut."""
    flat = []
    const = 1.0
    for f in factors:
        f = _coerce(f)
        if isinstance(f, Prod):
            flat.extend(f.factors)
        else:
            flat.append(f)
    kept = []
    for f in flat:
        if isinstance(f, Const):
            const *= f.value
        else:
            kept.append(f)
    if const == 0.0:
        return Const(0.0)
    if const != 1.0 or not kept:
        kept.insert(0, Const(const))
    return kept[0] if len(kept) == 1 else Prod(kept)


def ipow(base: Expression, k: int) -> Expression:
    base = _coerce(base)
    if k == 0:
        return Const(1.0)
    if k == 1:
        return base
    if isinstance(base, Const):
        return Const(base.value ** k)
    return IPow(base, k)


ZERO = Const(0.0)
X0, X1, X2, X3 = (Coord(i) for i in range(4))


# ---------------------------------------------------------------------------
# parser for config strings, e.g. "0.5*x2 + sin(2*x3)" or "-1*exp(-1*x3^2)"

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*^()]))"
)

_FUNCS = {"sin": Sin, "cos": Cos, "exp": Exp}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                if text[pos:].strip() == "":
                    break
                raise ExpressionParseError(f"bad character at {pos!r} in {text!r}")
            self.tokens.append((m.lastgroup, m.group(m.lastgroup)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        kind, val = self.take()
        if val != value:
            raise ExpressionParseError(f"expected {value!r}, got {val!r} in {self.text!r}")

    def parse(self) -> Expression:
        e = self.sum_()
        if self.peek() != (None, None):
            raise ExpressionParseError(f"trailing input in {self.text!r}")
        return e

    def sum_(self):
        terms = [self.term()]
        while self.peek()[1] in ("+", "-"):
            _, op = self.take()
            t = self.term()
            terms.append(t if op == "+" else mul(Const(-1.0), t))
        return add(*terms)

    def term(self):
        factors = [self.unary()]
        while self.peek()[1] == "*":
            self.take()
            factors.append(self.unary())
        return mul(*factors)

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return mul(Const(-1.0), self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val = self.take()
            neg = False
            if val == "-":
                neg = True
                kind, val = self.take()
            if kind != "num":
                raise ExpressionParseError(f"exponent must be an integer in {self.text!r}")
            if neg:
                raise ExpressionParseError("negative exponents are not supported")
            k = float(val)
            if int(k) != k:
                raise ExpressionParseError("exponent must be an integer")
            return ipow(base, int(k))
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            if val in _FUNCS:
                self.expect("(")
                arg = self.sum_()
                self.expect(")")
                return _FUNCS[val](arg)
            if val in COORD_NAMES:
                return Coord(COORD_NAMES.index(val))
            raise ExpressionParseError(f"unknown name {val!r} in {self.text!r}")
        if val == "(":
            e = self.sum_()
            self.expect(")")
            return e
        raise ExpressionParseError(f"unexpected token {val!r} in {self.text!r}")


def parse_expression(text: str) -> Expression:
    return _Parser(text).parse()
