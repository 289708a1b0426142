import math

import numpy as np
import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from src import dual_numbers as dn
from src.algebra import PGA2D, PGA3D
from src.dual_numbers import DualScalar, Expression, MultiDualScalar
from src.errors import DualDomainError, ExpressionError, PGAError


def test_eps_squares_to_zero():
    eps = DualScalar(0.0, 1.0)
    square = eps * eps
    assert (square.re, square.du) == (0.0, 0.0)


def test_arithmetic_rules():
    a, b = DualScalar(2.0, 3.0), DualScalar(5.0, 7.0)
    product = a * b
    assert (product.re, product.du) == (10.0, 29.0)
    quotient = a / b
    assert quotient.re == pytest.approx(0.4)
    assert quotient.du == pytest.approx((3.0 * 5.0 - 2.0 * 7.0) / 25.0)
    shifted = 1.0 - a
    assert (shifted.re, shifted.du) == (-1.0, -3.0)


def test_pseudoscalar_embedding_multiplies_like_dual_numbers():
    for algebra in (PGA2D, PGA3D):
        a = dn.to_multivector(DualScalar(2.0, 3.0), algebra)
        b = dn.to_multivector(DualScalar(5.0, 7.0), algebra)
        product = dn.from_multivector(a * b)
        assert (product.re, product.du) == (10.0, 29.0)


def test_elementary_derivatives():
    x = 0.7
    assert dn.derivative(dn.exp, x) == pytest.approx(math.exp(x))
    assert dn.derivative(dn.log, x) == pytest.approx(1.0 / x)
    assert dn.derivative(dn.sin, x) == pytest.approx(math.cos(x))
    assert dn.derivative(dn.cos, x) == pytest.approx(-math.sin(x))
    assert dn.derivative(dn.tan, x) == pytest.approx(1.0 / math.cos(x) ** 2)
    assert dn.derivative(dn.sqrt, x) == pytest.approx(0.5 / math.sqrt(x))


def test_dual_exponent():
    assert dn.derivative(lambda x: x ** x, 2.0) == pytest.approx(4.0 * (math.log(2.0) + 1.0))
    assert dn.derivative(lambda x: 2.0 ** x, 1.5) == pytest.approx(math.log(2.0) * 2.0 ** 1.5)


def test_constant_function_has_zero_derivative():
    assert dn.derivative(lambda x: 3.0, 1.0) == 0.0
    assert dn.value_and_derivative(lambda x: 3.0, 1.0) == (3.0, 0.0)


@pytest.mark.parametrize(
    "f, x",
    [
        (dn.log, 0.0),
        (dn.log, -1.0),
        (dn.sqrt, 0.0),
        (lambda x: x ** -1, 0.0),
        (lambda x: x ** 0.5, -2.0),
        (abs, 0.0),
        (lambda x: (-2.0) ** x, 1.0),
    ],
)
def test_domain_errors(f, x):
    with pytest.raises(DualDomainError):
        dn.derivative(f, x)


def test_cannot_mix_dual_kinds():
    with pytest.raises(PGAError):
        DualScalar(1.0, 1.0) + MultiDualScalar(1.0, [1.0, 0.0])


def test_gradient():
    value, grad = dn.value_and_gradient(lambda x, y: x * y + dn.sin(x), [1.0, 2.0])
    assert value == pytest.approx(2.0 + math.sin(1.0))
    assert grad == pytest.approx([2.0 + math.cos(1.0), 1.0])
    assert np.array_equal(dn.gradient(lambda x, y: 5.0, [1.0, 2.0]), [0.0, 0.0])


@settings(max_examples=50)
@given(
    st.lists(st.integers(min_value=-9, max_value=9), min_size=1, max_size=5),
    st.integers(min_value=1, max_value=9),
    st.integers(min_value=-16, max_value=16),
)
def test_polynomial_derivatives_are_exact_at_dyadic_points(coeffs, lead, k):
    coeffs = coeffs + [lead]
    text = " + ".join(f"({c})*x^{i}" for i, c in enumerate(coeffs))
    x = sympy.Symbol("x")
    point = sympy.Rational(k, 8)
    reference = sympy.diff(sum(c * x ** i for i, c in enumerate(coeffs)), x).subs(x, point)
    result = Expression(text).evaluate({"x": k / 8.0})
    assert result["derivative"] == float(reference)


@pytest.mark.parametrize("x", [0.5, 0.9, 1.3, 2.0])
def test_matches_central_differences(x):
    expr = Expression("sin(x)*exp(x)/(1 + x^2) + sqrt(x) - log(x)*cos(x)")
    h = 1e-5
    numeric = (expr(x + h) - expr(x - h)) / (2.0 * h)
    assert dn.derivative(expr, x) == pytest.approx(numeric, rel=1e-5)


def test_expression_variables_and_call():
    expr = Expression("y*x^2 + tan(y)")
    assert expr.variables == ["x", "y"]
    assert expr(2.0, 0.5) == pytest.approx(2.0 + math.tan(0.5))
    with pytest.raises(ExpressionError):
        expr(1.0)


def test_expression_evaluate_gradient():
    result = Expression("x*y").evaluate({"x": 2.0, "y": 3.0})
    assert result == {
        "expression": "x*y",
        "variables": ["x", "y"],
        "point": [2.0, 3.0],
        "value": 6.0,
        "gradient": [3.0, 2.0],
    }


def test_expression_evaluate_single_variable():
    result = Expression("x^3").evaluate({"x": 2.0})
    assert result["value"] == 8.0
    assert result["derivative"] == 12.0


@pytest.mark.parametrize("text", ["x +", "foo(x)", "x == 1", "(x"])
def test_bad_expressions(text):
    with pytest.raises(ExpressionError):
        Expression(text)


def test_missing_variable():
    with pytest.raises(ExpressionError):
        Expression("x + y").evaluate({"x": 1.0})


UNARY = {
    "sin": dn.sin,
    "cos": dn.cos,
    "damped_square": lambda u: u * u / (1.0 + u * u),
    "affine": lambda u: 0.5 * u + 1.0,
    "soft": lambda u: dn.sqrt(1.0 + u * u),
}

composition_trees = st.recursive(
    st.just("x"),
    lambda children: st.one_of(
        st.tuples(st.sampled_from(sorted(UNARY)), children),
        st.tuples(st.sampled_from(["+", "*"]), children, children),
    ),
    max_leaves=6,
)


def _build(tree):
    if tree == "x":
        return lambda u: u
    if len(tree) == 2:
        f, inner = UNARY[tree[0]], _build(tree[1])
        return lambda u: f(inner(u))
    op, left, right = tree[0], _build(tree[1]), _build(tree[2])
    if op == "+":
        return lambda u: left(u) + right(u)
    return lambda u: left(u) * right(u)


@settings(max_examples=100)
@given(composition_trees, composition_trees, st.floats(min_value=-1.0, max_value=1.0))
def test_chain_rule_on_composition_trees(outer_tree, inner_tree, x):
    f, g = _build(outer_tree), _build(inner_tree)
    inner_value, inner_slope = dn.value_and_derivative(g, x)
    assume(abs(inner_value) < 1e3)
    outer_slope = dn.derivative(f, inner_value)
    composed = dn.derivative(lambda u: f(g(u)), x)
    assume(abs(composed) < 1e4)
    assert composed == pytest.approx(outer_slope * inner_slope, rel=1e-9, abs=1e-8)
