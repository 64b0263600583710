import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from covspec import expr
from covspec.exact import PiRational
from covspec.expr import ExpressionError, WarpFunction

EXPRESSIONS = [
    "1+exp(-r^2)",
    "exp(r)",
    "1/sqrt(1+r^2)",
    "sqrt(r^2+1)",
    "r^2*exp(-r)",
    "cosh(r)-sinh(r)/2",
    "2+sin(r)",
    "log(1+r^2)",
    "tanh(r)*cos(3*r)",
    "(r+1)^(3/2)",
    "-r/(2+r^2)",
    "pi*r^3 - 2^r",
]

xs = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


@pytest.mark.parametrize("text", EXPRESSIONS)
def test_derivative_matches_sympy(text):
    w = WarpFunction(text)
    r = sympy.Symbol("r", real=True)
    ref = sympy.diff(w.to_sympy(), r)
    assert sympy.simplify(w.derivative().to_sympy() - ref) == 0


@pytest.mark.parametrize("text", EXPRESSIONS)
@given(x=xs)
def test_printed_form_reparses(text, x):
    node = expr.parse(text)
    again = expr.parse(str(node))
    with np.errstate(all="ignore"):
        a, b = expr.evaluate(node, {"r": x}), expr.evaluate(again, {"r": x})
    if np.isfinite(a):
        assert b == pytest.approx(a, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("text", EXPRESSIONS)
def test_compiled_agrees_with_tree_walk(text):
    w = WarpFunction(text)
    grid = np.linspace(0.1, 2.9, 29)
    with np.errstate(all="ignore"):
        tree = np.array([expr.evaluate(w.node, {"r": float(x)}) for x in grid], dtype=float)
        fast = np.asarray(w(grid), dtype=float) * np.ones_like(grid)
    np.testing.assert_allclose(fast, tree, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("text", EXPRESSIONS)
def test_derivative_error_small(text):
    assert WarpFunction(text).derivative_error(np.linspace(0.1, 2.9, 57)) < 1e-5


def test_derivative_error_sees_a_wrong_derivative():
    w = WarpFunction("exp(r)")
    w._d1 = WarpFunction("2*exp(r)")
    assert w.derivative_error([0.5, 1.0]) > 0.5


@given(x=xs, c=st.floats(min_value=0.2, max_value=5.0))
def test_substitute_is_composition(x, c):
    node = expr.parse("r^2*exp(-r)+sin(r)")
    q = Fraction(c).limit_denominator(10**6)
    arg = expr.div(expr.Var("r"), expr.Num(q))
    sub = expr.substitute(node, "r", arg)
    assert expr.evaluate(sub, {"r": x}) == pytest.approx(expr.evaluate(node, {"r": x / float(q)}), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize(
    "text, value",
    [
        ("2*pi", PiRational.pi(2)),
        ("3/4", PiRational(Fraction(3, 4))),
        ("pi/2+1", PiRational(1, Fraction(1, 2))),
        ("-(1+pi)", PiRational(-1, -1)),
    ],
)
def test_exact_constants(text, value):
    assert expr.constant(text) == value


@pytest.mark.parametrize("text, value", [("sqrt(2)", math.sqrt(2)), ("exp(1)", math.e), ("pi^2", math.pi**2)])
def test_inexact_constants_fall_back_to_float(text, value):
    out = expr.constant(text)
    assert isinstance(out, float) and out == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("bad", ["", "r+", "foo(r)", "r**", "(r", "2 3", "s+1"])
def test_parse_errors(bad):
    with pytest.raises(ExpressionError):
        expr.parse(bad)


def test_constant_detection():
    assert WarpFunction("2+pi").is_constant()
    assert WarpFunction("1").is_constant()
    assert not WarpFunction("1+r").is_constant()
