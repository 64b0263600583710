"""Small expression language for warping functions and length constants.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom (('^' | '**') unary)?          # right associative
    atom   := NUMBER | 'pi' | VAR | FUNC '(' expr ')' | '(' expr ')'

``pi`` stays symbolic until evaluation, so constants such as ``2*pi*(1+1/3)``
evaluate exactly to :class:`~covspec.exact.PiRational` when possible.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import PiRational

FUNCTIONS = ("exp", "log", "sqrt", "sin", "cos", "sinh", "cosh", "tanh")


class ExpressionError(ValueError):
    """Parse or evaluation failure; ``column`` is 1-based when known."""

    def __init__(self, message: str, column: int | None = None, text: str | None = None):
        self.column = column
        self.text = text
        if column is not None:
            message = f"{message} (column {column})"
        super().__init__(message)


class NotExact(Exception):
    pass


# --------------------------------------------------------------------------
# expression tree


class Node:
    prec = 100

    def deriv(self, var: str) -> "Node":
        raise NotImplementedError

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __truediv__(self, other):
        return div(self, other)

    def __neg__(self):
        return neg(self)


@dataclass(frozen=True)
class Num(Node):
    value: Fraction

    def __str__(self):
        v = self.value
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"

    @property
    def prec(self):
        return 100 if self.value.denominator == 1 and self.value >= 0 else 2

    def deriv(self, var):
        return ZERO


@dataclass(frozen=True)
class Pi(Node):
    def __str__(self):
        return "pi"

    def deriv(self, var):
        return ZERO


@dataclass(frozen=True)
class Var(Node):
    name: str

    def __str__(self):
        return self.name

    def deriv(self, var):
        return ONE if var == self.name else ZERO


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    @property
    def prec(self):
        return {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}[self.op]

    def __str__(self):
        p = self.prec
        if self.op == "^":
            ls = _wrap(self.left, p, strict=True)
            rs = _wrap(self.right, p, strict=False)
            return f"{ls}^{rs}"
        ls = _wrap(self.left, p, strict=False)
        rs = _wrap(self.right, p, strict=self.op in "-/")
        sep = f" {self.op} " if self.op in "+-" else self.op
        return f"{ls}{sep}{rs}"

    def deriv(self, var):
        a, b = self.left, self.right
        da, db = a.deriv(var), b.deriv(var)
        if self.op == "+":
            return add(da, db)
        if self.op == "-":
            return sub(da, db)
        if self.op == "*":
            return add(mul(da, b), mul(a, db))
        if self.op == "/":
            return div(sub(mul(da, b), mul(a, db)), power(b, Num(Fraction(2))))
        # power
        if db == ZERO:
            return mul(mul(b, power(a, sub(b, ONE))), da)
        # a^b = exp(b log a)
        return mul(self, add(mul(db, Func("log", a)), mul(b, div(da, a))))


@dataclass(frozen=True)
class Neg(Node):
    arg: Node
    prec = 3

    def __str__(self):
        return "-" + _wrap(self.arg, 3, strict=False)

    def deriv(self, var):
        return neg(self.arg.deriv(var))


@dataclass(frozen=True)
class Func(Node):
    name: str
    arg: Node

    def __str__(self):
        return f"{self.name}({self.arg})"

    def deriv(self, var):
        u = self.arg
        du = u.deriv(var)
        if du == ZERO:
            return ZERO
        n = self.name
        if n == "exp":
            outer = self
        elif n == "log":
            outer = div(ONE, u)
        elif n == "sqrt":
            outer = div(ONE, mul(Num(Fraction(2)), self))
        elif n == "sin":
            outer = Func("cos", u)
        elif n == "cos":
            outer = neg(Func("sin", u))
        elif n == "sinh":
            outer = Func("cosh", u)
        elif n == "cosh":
            outer = Func("sinh", u)
        elif n == "tanh":
            outer = sub(ONE, power(self, Num(Fraction(2))))
        else:  # pragma: no cover - parser rejects unknown names
            raise ExpressionError(f"no derivative rule for {n}")
        return mul(outer, du)


ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))


def _wrap(node: Node, prec: int, strict: bool) -> str:
    s = str(node)
    np_ = node.prec
    if np_ < prec or (strict and np_ == prec):
        return f"({s})"
    return s


# light simplifying constructors --------------------------------------------


def _is_num(n, v=None):
    return isinstance(n, Num) and (v is None or n.value == v)


def add(a, b):
    if _is_num(a, 0):
        return b
    if _is_num(b, 0):
        return a
    if _is_num(a) and _is_num(b):
        return Num(a.value + b.value)
    return BinOp("+", a, b)


def sub(a, b):
    if _is_num(b, 0):
        return a
    if _is_num(a, 0):
        return neg(b)
    if _is_num(a) and _is_num(b):
        return Num(a.value - b.value)
    if a == b:
        return ZERO
    return BinOp("-", a, b)


def mul(a, b):
    if _is_num(a, 0) or _is_num(b, 0):
        return ZERO
    if _is_num(a, 1):
        return b
    if _is_num(b, 1):
        return a
    if _is_num(a) and _is_num(b):
        return Num(a.value * b.value)
    if _is_num(a, -1):
        return neg(b)
    if _is_num(b, -1):
        return neg(a)
    return BinOp("*", a, b)


def div(a, b):
    if _is_num(a, 0):
        return ZERO
    if _is_num(b, 1):
        return a
    if _is_num(a) and _is_num(b) and b.value != 0:
        return Num(a.value / b.value)
    return BinOp("/", a, b)


def neg(a):
    if _is_num(a):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a, b):
    if _is_num(b, 0):
        return ONE
    if _is_num(b, 1):
        return a
    return BinOp("^", a, b)


# --------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExpressionError(f"unexpected character {text[col - 1]!r}", col, text)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start + 1))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, v, col = self.take()
        if v != value:
            found = "end of input" if kind == "end" else repr(v)
            raise ExpressionError(f"expected {value!r}, found {found}", col, self.text)

    def parse(self) -> Node:
        node = self.expr()
        kind, v, col = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected token {v!r}", col, self.text)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = BinOp(op, node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.unary()
            node = BinOp(op, node, rhs)
        return node

    def unary(self):
        kind, v, _ = self.peek()
        if kind == "op" and v in ("-", "+"):
            self.take()
            arg = self.unary()
            return Neg(arg) if v == "-" else arg
        return self.power()

    def power(self):
        base = self.atom()
        kind, v, _ = self.peek()
        if kind == "op" and v in ("^", "**"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, v, col = self.take()
        if kind == "num":
            return Num(Fraction(v))
        if kind == "name":
            if v == "pi":
                return Pi()
            if v in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(v, arg)
            if v in self.variables:
                return Var(v)
            raise ExpressionError(f"unknown name {v!r}", col, self.text)
        if v == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(v)
        raise ExpressionError(f"unexpected {found}", col, self.text)


def parse(text: str, variables: tuple[str, ...] = ("r",)) -> Node:
    if not text or not text.strip():
        raise ExpressionError("empty expression", 1, text)
    return _Parser(text, variables).parse()


# --------------------------------------------------------------------------
# evaluation

_NP = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
}


def evaluate(node: Node, env: dict):
    if isinstance(node, Num):
        return float(node.value)
    if isinstance(node, Pi):
        return math.pi
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise ExpressionError(f"variable {node.name!r} is unbound") from None
    if isinstance(node, Neg):
        return -evaluate(node.arg, env)
    if isinstance(node, Func):
        return _NP[node.name](evaluate(node.arg, env))
    a = evaluate(node.left, env)
    b = evaluate(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    if isinstance(node.right, Num) and node.right.value.denominator == 1:
        return a ** int(node.right.value)
    return np.power(a, b)


def substitute(node: Node, var: str, value: Node) -> Node:
    """Replace every occurrence of ``var`` in ``node`` by ``value``."""
    if isinstance(node, Var):
        return value if node.name == var else node
    if isinstance(node, (Num, Pi)):
        return node
    if isinstance(node, Neg):
        return neg(substitute(node.arg, var, value))
    if isinstance(node, Func):
        return Func(node.name, substitute(node.arg, var, value))
    l, r = substitute(node.left, var, value), substitute(node.right, var, value)
    return {"+": add, "-": sub, "*": mul, "/": div, "^": power}[node.op](l, r)


def _source(node: Node, var: str) -> str:
    """Python source computing ``node``; mirrors ``evaluate`` operation by operation."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Pi):
        return repr(math.pi)
    if isinstance(node, Var):
        if node.name != var:
            raise ExpressionError(f"variable {node.name!r} is unbound")
        return "x"
    if isinstance(node, Neg):
        return f"(-{_source(node.arg, var)})"
    if isinstance(node, Func):
        return f"_np.{node.name}({_source(node.arg, var)})"
    a, b = _source(node.left, var), _source(node.right, var)
    if node.op == "^":
        if isinstance(node.right, Num) and node.right.value.denominator == 1:
            return f"({a} ** {int(node.right.value)})"
        return f"_np.power({a}, {b})"
    return f"({a} {node.op} {b})"


def compile_function(node: Node, var: str = "r"):
    """Compile ``node`` to a vectorised callable of one variable."""
    code = f"lambda x: {_source(node, var)}"
    return eval(code, {"_np": np, "__builtins__": {}})


def evaluate_exact(node: Node):
    """Evaluate a variable-free expression in Q + Q*pi, or raise NotExact."""
    if isinstance(node, Num):
        return PiRational(node.value)
    if isinstance(node, Pi):
        return PiRational.pi()
    if isinstance(node, Neg):
        return -evaluate_exact(node.arg)
    if isinstance(node, (Var, Func)):
        raise NotExact(str(node))
    a = evaluate_exact(node.left)
    b = evaluate_exact(node.right)
    try:
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            r = a * b
        elif node.op == "/":
            if not b:
                raise ExpressionError("division by zero")
            r = a / b
        else:
            if not (a.is_rational() and b.is_rational() and b.rational.denominator == 1):
                raise NotExact(str(node))
            if a.rational == 0 and b.rational < 0:
                raise ExpressionError("division by zero")
            return PiRational(a.rational ** int(b.rational))
    except TypeError:
        raise NotExact(str(node)) from None
    if r is NotImplemented:
        raise NotExact(str(node))
    return r


def to_sympy(node: Node):
    import sympy

    if isinstance(node, Num):
        return sympy.Rational(node.value.numerator, node.value.denominator)
    if isinstance(node, Pi):
        return sympy.pi
    if isinstance(node, Var):
        return sympy.Symbol(node.name, real=True)
    if isinstance(node, Neg):
        return -to_sympy(node.arg)
    if isinstance(node, Func):
        return getattr(sympy, node.name)(to_sympy(node.arg))
    a, b = to_sympy(node.left), to_sympy(node.right)
    return {"+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b, "/": lambda: a / b, "^": lambda: a**b}[
        node.op
    ]()


def constant(text: str):
    """Parse a numeric constant: exact PiRational when possible, else float."""
    node = parse(text, variables=())
    try:
        return evaluate_exact(node)
    except NotExact:
        return float(evaluate(node, {}))


def constant_sympy(text: str):
    return to_sympy(parse(text, variables=()))


# --------------------------------------------------------------------------


class WarpFunction:
    """A parsed function of one variable with symbolic first/second derivatives.

    >>> f = WarpFunction("1+exp(-r^2)")
    >>> round(f(0.0), 12), round(f.d1(1.0), 6)
    (2.0, -0.735759)
    """

    def __init__(self, text: str | Node, var: str = "r"):
        if isinstance(text, Node):
            self.node = text
            self.text = str(text)
        else:
            self.text = text
            self.node = parse(text, (var,))
        self.var = var
        self._d1 = None
        self._d2 = None
        self._fn = None

    def __call__(self, x):
        if self._fn is None:
            self._fn = compile_function(self.node, self.var)
        return self._fn(x)

    def derivative(self) -> "WarpFunction":
        if self._d1 is None:
            self._d1 = WarpFunction(self.node.deriv(self.var), self.var)
        return self._d1

    def d1(self, x):
        return self.derivative()(x)

    def d2(self, x):
        return self.derivative().derivative()(x)

    def to_sympy(self):
        return to_sympy(self.node)

    def symbol(self):
        import sympy

        return sympy.Symbol(self.var, real=True)

    def check_positive(self, lo: float, hi: float, n: int = 400) -> bool:
        xs = np.linspace(lo, hi, n)
        with np.errstate(all="ignore"):
            vals = np.asarray(self(xs), dtype=float) * np.ones_like(xs)
        return bool(np.all(np.isfinite(vals)) and np.all(vals > 0))

    def derivative_error(self, xs, step: float = 1e-6) -> float:
        """Largest relative gap between ``d1`` and a central difference on ``xs``.

        The gap is measured against ``max(|f'|, |f|, 1)`` so that stationary
        points do not blow it up.
        """
        xs = np.asarray(xs, dtype=float)
        h = step * np.maximum(1.0, np.abs(xs))
        ones = np.ones_like(xs)
        sym = np.asarray(self.d1(xs), dtype=float) * ones
        fd = (np.asarray(self(xs + h), dtype=float) - np.asarray(self(xs - h), dtype=float)) / (2 * h)
        scale = np.maximum.reduce([np.abs(sym), np.abs(np.asarray(self(xs), dtype=float) * ones), ones])
        return float(np.max(np.abs(fd - sym) / scale))

    def is_constant(self) -> bool:
        return self.var not in _free_vars(self.node)

    def __str__(self):
        return str(self.node)

    def __repr__(self):
        return f"WarpFunction({self.text!r})"


def _free_vars(node: Node) -> set:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Num, Pi)):
        return set()
    if isinstance(node, Neg):
        return _free_vars(node.arg)
    if isinstance(node, Func):
        return _free_vars(node.arg)
    return _free_vars(node.left) | _free_vars(node.right)
