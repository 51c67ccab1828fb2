"""Closed-form radial functions with exact second-order jets.

A radial function is entered as text in one variable ``r`` (e.g.
``"exp(2*r)"``, ``"1 + 0.5*sin(pi*r)"``) and parsed into an immutable tree.
Evaluation propagates truncated Taylor arithmetic through the tree, so every
evaluation returns the value together with the exact first and second
derivatives at the point.  No finite differencing is involved anywhere.

Grammar (standard infix):

    expr   :=  term  { ("+" | "-") term }
    term   :=  factor { ("*" | "/") factor }
    factor :=  "-" factor | power
    power  :=  atom [ "^" factor ]          # right-associative
    atom   :=  number | "r" | "pi" | "e" | name "(" expr ")" | "(" expr ")"

``^`` binds tighter than unary minus, so ``-r^2`` is ``-(r^2)``.  Allowed
function names: sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt, abs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import DomainError, NonFiniteResult, ParseError

__all__ = [
    "Jet2",
    "RadialExpr",
    "parse_expr",
    "eval_jet2",
    "serialize",
    "FUNCTIONS",
    "CONSTANTS",
]

FUNCTIONS = frozenset(
    {"sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "abs"}
)
CONSTANTS = {"pi": math.pi, "e": math.e}


# ---------------------------------------------------------------------------
# Jets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Jet2:
    """Value and first two derivatives of a radial function at one point."""

    v0: float
    v1: float
    v2: float

    def __add__(self, other: "Jet2") -> "Jet2":
        return Jet2(self.v0 + other.v0, self.v1 + other.v1, self.v2 + other.v2)

    def __sub__(self, other: "Jet2") -> "Jet2":
        return Jet2(self.v0 - other.v0, self.v1 - other.v1, self.v2 - other.v2)

    def __neg__(self) -> "Jet2":
        return Jet2(-self.v0, -self.v1, -self.v2)

    def __mul__(self, other: "Jet2") -> "Jet2":
        a, b = self, other
        return Jet2(
            a.v0 * b.v0,
            a.v1 * b.v0 + a.v0 * b.v1,
            a.v2 * b.v0 + 2.0 * a.v1 * b.v1 + a.v0 * b.v2,
        )

    def __truediv__(self, other: "Jet2") -> "Jet2":
        a, b = self, other
        if b.v0 == 0.0:
            raise DomainError("division by zero")
        q0 = a.v0 / b.v0
        q1 = (a.v1 - q0 * b.v1) / b.v0
        q2 = (a.v2 - 2.0 * q1 * b.v1 - q0 * b.v2) / b.v0
        return Jet2(q0, q1, q2)

    def compose(self, u0: float, u1: float, u2: float) -> "Jet2":
        """Jet of u(self) given the scalar derivatives of u at self.v0."""
        return Jet2(u0, u1 * self.v1, u2 * self.v1 * self.v1 + u1 * self.v2)


# ---------------------------------------------------------------------------
# Expression tree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Num | Var | Const | Neg | BinOp | Call


@dataclass(frozen=True)
class RadialExpr:
    """A parsed closed-form radial function."""

    root: Node

    def __str__(self) -> str:
        return serialize(self)

    def jet(self, r: float) -> Jet2:
        return eval_jet2(self, r)


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_NUM_RE = re.compile(r"(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_OPS = "+-*/^()"


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        m = _NUM_RE.match(text, i)
        if m:
            tokens.append(("num", m.group(), i))
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(("ident", m.group(), i))
            i = m.end()
            continue
        raise ParseError(i, "a number, identifier, operator, or parenthesis")
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, val, off = self.peek()
        if kind == "op" and val == op:
            self.advance()
            return
        raise ParseError(off, f"'{op}'")

    def parse(self) -> Node:
        node = self.expr()
        kind, _, off = self.peek()
        if kind != "end":
            raise ParseError(off, "an operator or end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                node = BinOp(val, node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                node = BinOp(val, node, self.factor())
            else:
                return node

    def factor(self) -> Node:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            return BinOp("^", node, self.factor())
        return node

    def atom(self) -> Node:
        kind, val, off = self.advance()
        if kind == "num":
            return Num(float(val))
        if kind == "ident":
            if val == "r":
                return Var()
            if val in CONSTANTS:
                return Const(val)
            if val in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(val, arg)
            raise ParseError(off, "a known identifier (r, pi, e, or a function name)")
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(off, "a number, 'r', a constant, a function call, or '('")


def parse_expr(text: str) -> RadialExpr:
    """Parse expression text into a ``RadialExpr``.

    Raises ``ParseError`` (with character offset and what was expected) on
    malformed input or unknown identifiers.
    """
    return RadialExpr(_Parser(text).parse())


# ---------------------------------------------------------------------------
# Serialization (minimal parentheses; parses back to an identical tree)
# ---------------------------------------------------------------------------

def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        if node.op in "+-":
            return 1
        if node.op in "*/":
            return 2
        return 4  # ^
    if isinstance(node, Neg):
        return 3
    return 5


def _serialize(node: Node, min_prec: int) -> str:
    if isinstance(node, Num):
        out = repr(node.value)
    elif isinstance(node, Var):
        out = "r"
    elif isinstance(node, Const):
        out = node.name
    elif isinstance(node, Call):
        out = f"{node.func}({_serialize(node.arg, 0)})"
    elif isinstance(node, Neg):
        out = "-" + _serialize(node.arg, 3)
    elif node.op in "+-":
        out = f"{_serialize(node.left, 1)} {node.op} {_serialize(node.right, 2)}"
    elif node.op in "*/":
        out = f"{_serialize(node.left, 2)}{node.op}{_serialize(node.right, 3)}"
    else:  # ^ is right-associative; the base must be atomic
        out = f"{_serialize(node.left, 5)}^{_serialize(node.right, 3)}"
    if _prec(node) < min_prec:
        return f"({out})"
    return out


def serialize(expr: RadialExpr) -> str:
    return _serialize(expr.root, 0)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _jet_sin(x: float):
    s, c = math.sin(x), math.cos(x)
    return s, c, -s


def _jet_cos(x: float):
    s, c = math.sin(x), math.cos(x)
    return c, -s, -c


def _jet_tan(x: float):
    t = math.tan(x)
    d = 1.0 + t * t
    return t, d, 2.0 * t * d


def _jet_sinh(x: float):
    s, c = math.sinh(x), math.cosh(x)
    return s, c, s


def _jet_cosh(x: float):
    s, c = math.sinh(x), math.cosh(x)
    return c, s, c


def _jet_tanh(x: float):
    t = math.tanh(x)
    d = 1.0 - t * t
    return t, d, -2.0 * t * d


def _jet_exp(x: float):
    v = math.exp(x)
    return v, v, v


def _jet_log(x: float):
    if x <= 0.0:
        raise DomainError(f"log of nonpositive value {x}")
    return math.log(x), 1.0 / x, -1.0 / (x * x)


def _jet_sqrt(x: float):
    if x <= 0.0:
        raise DomainError(f"sqrt jet undefined at {x}")
    v = math.sqrt(x)
    return v, 0.5 / v, -0.25 / (x * v)


_FUNC_JETS = {
    "sin": _jet_sin,
    "cos": _jet_cos,
    "tan": _jet_tan,
    "sinh": _jet_sinh,
    "cosh": _jet_cosh,
    "tanh": _jet_tanh,
    "exp": _jet_exp,
    "log": _jet_log,
    "sqrt": _jet_sqrt,
}


def _int_pow(base: Jet2, n: int) -> Jet2:
    if n == 0:
        return Jet2(1.0, 0.0, 0.0)
    if n < 0:
        if base.v0 == 0.0:
            raise DomainError("zero raised to a negative power")
        return Jet2(1.0, 0.0, 0.0) / _int_pow(base, -n)
    acc = Jet2(1.0, 0.0, 0.0)
    sq = base
    while n:
        if n & 1:
            acc = acc * sq
        n >>= 1
        if n:
            sq = sq * sq
    return acc


def _pow(base: Jet2, expo: Jet2) -> Jet2:
    # A constant integer exponent permits any base sign; everything else is
    # defined through exp/log and needs a positive base.
    if expo.v1 == 0.0 and expo.v2 == 0.0 and float(expo.v0).is_integer():
        return _int_pow(base, int(expo.v0))
    if base.v0 <= 0.0:
        raise DomainError(
            f"non-integer power of nonpositive base {base.v0}"
        )
    lg = base.compose(*_jet_log(base.v0))
    return (expo * lg).compose(*_jet_exp(expo.v0 * lg.v0))


def _eval(node: Node, r: float) -> Jet2:
    if isinstance(node, Num):
        return Jet2(node.value, 0.0, 0.0)
    if isinstance(node, Var):
        return Jet2(r, 1.0, 0.0)
    if isinstance(node, Const):
        return Jet2(CONSTANTS[node.name], 0.0, 0.0)
    if isinstance(node, Neg):
        return -_eval(node.arg, r)
    if isinstance(node, Call):
        x = _eval(node.arg, r)
        if node.func == "abs":
            if x.v0 > 0.0:
                return x
            if x.v0 < 0.0:
                return -x
            raise DomainError("abs jet undefined at 0")
        return x.compose(*_FUNC_JETS[node.func](x.v0))
    left = _eval(node.left, r)
    right = _eval(node.right, r)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        return left / right
    return _pow(left, right)


def eval_jet2(expr: RadialExpr, r: float) -> Jet2:
    """Evaluate value, first, and second derivative of ``expr`` at ``r``.

    Raises ``DomainError`` outside the expression's real domain and
    ``NonFiniteResult`` if the arithmetic overflows.
    """
    try:
        jet = _eval(expr.root, r)
    except OverflowError as exc:
        raise NonFiniteResult(f"overflow while evaluating at r={r}") from exc
    if not (math.isfinite(jet.v0) and math.isfinite(jet.v1) and math.isfinite(jet.v2)):
        raise NonFiniteResult(f"non-finite jet {jet} at r={r}")
    return jet
