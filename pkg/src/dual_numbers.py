"""Forward-mode automatic differentiation with dual numbers.

A dual number ``re + du*eps`` with ``eps**2 = 0`` is the scalar + pseudoscalar
subalgebra of Cl(n,0,1): the pseudoscalar I plays the role of eps.
:class:`MultiDualScalar` carries one nilpotent direction per variable and
drops every product of two of them.
"""
import logging
import math
import numbers
from tokenize import TokenError
from typing import Callable, Dict, List, Sequence, Union

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from src.algebra import Algebra, Multivector
from src.errors import DualDomainError, ExpressionError, PGAError

logger = logging.getLogger(__name__)


class _Dual:
    __slots__ = ("re", "du")

    def _make(self, re, du):
        raise NotImplementedError

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        if isinstance(other, _Dual):
            raise PGAError(f"Cannot mix {type(self).__name__} and {type(other).__name__}")
        if isinstance(other, numbers.Real):
            return self._make(float(other), self.du * 0.0)
        return NotImplemented

    def lift(self, value: float, slope: float):
        """f(re) + f'(re) du eps for an analytic f with f(re) = value, f'(re) = slope."""
        return self._make(value, slope * self.du)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._make(self.re + other.re, self.du + other.du)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._make(self.re - other.re, self.du - other.du)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return self._make(-self.re, -self.du)

    def __pos__(self):
        return self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._make(self.re * other.re, self.re * other.du + self.du * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.re == 0.0:
            raise DualDomainError("Division by a dual number with zero real part", other.re)
        return self._make(self.re / other.re, (self.du * other.re - self.re * other.du) / (other.re * other.re))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, exponent):
        if isinstance(exponent, _Dual):
            return exp(exponent * log(self))
        if not isinstance(exponent, numbers.Real):
            return NotImplemented
        if float(exponent).is_integer():
            k = int(exponent)
            if k == 0:
                return self._make(1.0, self.du * 0.0)
            if self.re == 0.0 and k < 0:
                raise DualDomainError("Negative power of zero", self.re)
            return self.lift(self.re ** k, k * self.re ** (k - 1))
        p = float(exponent)
        if self.re < 0.0 or (self.re == 0.0 and p < 1.0):
            raise DualDomainError(f"Real power {p} outside its domain", self.re)
        return self.lift(self.re ** p, p * self.re ** (p - 1.0))

    def __rpow__(self, base):
        if not isinstance(base, numbers.Real):
            return NotImplemented
        if base <= 0.0:
            raise DualDomainError("Base of a dual exponent must be positive", float(base))
        return exp(self * math.log(base))

    def __abs__(self):
        if self.re == 0.0:
            raise DualDomainError("abs is not differentiable at zero", self.re)
        return self if self.re > 0.0 else -self


class DualScalar(_Dual):
    def __init__(self, re: float, du: float = 0.0):
        self.re = float(re)
        self.du = float(du)

    def _make(self, re, du):
        return DualScalar(re, du)

    def __repr__(self) -> str:
        return f"DualScalar({self.re!r}, {self.du!r})"


class MultiDualScalar(_Dual):
    def __init__(self, re: float, du: Sequence[float]):
        self.re = float(re)
        self.du = np.array(du, dtype=float)

    def _make(self, re, du):
        return MultiDualScalar(re, du)

    @classmethod
    def variable(cls, value: float, index: int, n: int) -> "MultiDualScalar":
        seed = np.zeros(n)
        seed[index] = 1.0
        return cls(value, seed)

    def __repr__(self) -> str:
        return f"MultiDualScalar({self.re!r}, {self.du.tolist()!r})"


Number = Union[float, _Dual]


def exp(x: Number) -> Number:
    if isinstance(x, _Dual):
        value = math.exp(x.re)
        return x.lift(value, value)
    return math.exp(x)


def log(x: Number) -> Number:
    if isinstance(x, _Dual):
        if x.re <= 0.0:
            raise DualDomainError("log of a non-positive value", x.re)
        return x.lift(math.log(x.re), 1.0 / x.re)
    if x <= 0.0:
        raise DualDomainError("log of a non-positive value", x)
    return math.log(x)


def sin(x: Number) -> Number:
    if isinstance(x, _Dual):
        return x.lift(math.sin(x.re), math.cos(x.re))
    return math.sin(x)


def cos(x: Number) -> Number:
    if isinstance(x, _Dual):
        return x.lift(math.cos(x.re), -math.sin(x.re))
    return math.cos(x)


def tan(x: Number) -> Number:
    if isinstance(x, _Dual):
        c = math.cos(x.re)
        if c == 0.0:
            raise DualDomainError("tan at a pole", x.re)
        return x.lift(math.tan(x.re), 1.0 / (c * c))
    return math.tan(x)


def sqrt(x: Number) -> Number:
    if isinstance(x, _Dual):
        if x.re <= 0.0:
            raise DualDomainError("sqrt needs a positive value to be differentiable", x.re)
        root = math.sqrt(x.re)
        return x.lift(root, 0.5 / root)
    if x < 0.0:
        raise DualDomainError("sqrt of a negative value", x)
    return math.sqrt(x)


def derivative(f: Callable[[Number], Number], x: float) -> float:
    result = f(DualScalar(x, 1.0))
    return result.du if isinstance(result, DualScalar) else 0.0


def value_and_derivative(f: Callable[[Number], Number], x: float):
    result = f(DualScalar(x, 1.0))
    if isinstance(result, DualScalar):
        return result.re, result.du
    return float(result), 0.0


def gradient(f: Callable[..., Number], xs: Sequence[float]) -> np.ndarray:
    n = len(xs)
    variables = [MultiDualScalar.variable(x, i, n) for i, x in enumerate(xs)]
    result = f(*variables)
    if isinstance(result, MultiDualScalar):
        return result.du.copy()
    return np.zeros(n)


def value_and_gradient(f: Callable[..., Number], xs: Sequence[float]):
    n = len(xs)
    result = f(*[MultiDualScalar.variable(x, i, n) for i, x in enumerate(xs)])
    if isinstance(result, MultiDualScalar):
        return result.re, result.du.copy()
    return float(result), np.zeros(n)


def to_multivector(x: DualScalar, algebra: Algebra) -> Multivector:
    """re + du I inside the given algebra."""
    return algebra.scalar(x.re) + x.du * algebra.pseudoscalar()


def from_multivector(mv: Multivector) -> DualScalar:
    return DualScalar(mv.scalar, mv.pseudoscalar_weight)


# expressions

DUAL_FUNCTIONS: Dict[str, Callable] = {
    "exp": exp,
    "log": log,
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "sqrt": sqrt,
}

_ALLOWED_FUNCTIONS = (sympy.exp, sympy.log, sympy.sin, sympy.cos, sympy.tan)
_TRANSFORMATIONS = standard_transformations + (convert_xor,)


class Expression:
    """Expression over + - * / ^ and the functions in :data:`DUAL_FUNCTIONS`.

    Parsing goes through sympy; the result is compiled against the dual-number
    functions so calling it with dual arguments differentiates it.
    """

    def __init__(self, text: str):
        self.text = text
        local = {name: sympy.Symbol(name) for name in ("E", "I", "S", "N", "O", "Q")}
        local.update({name: getattr(sympy, name) for name in DUAL_FUNCTIONS})
        try:
            expr = parse_expr(text, local_dict=local, transformations=_TRANSFORMATIONS, evaluate=True)
        except (SyntaxError, TokenError, TypeError, ValueError, sympy.SympifyError) as e:
            raise ExpressionError(f"Could not parse expression {text!r}: {e}") from e
        if not isinstance(expr, sympy.Expr):
            raise ExpressionError(f"Not an arithmetic expression: {text!r}")
        for node in sympy.preorder_traversal(expr):
            if isinstance(node, sympy.Function) and not isinstance(node, _ALLOWED_FUNCTIONS):
                raise ExpressionError(f"Unsupported function {node.func.__name__!r} in {text!r}")
        self.expr = expr
        self.symbols: List[sympy.Symbol] = sorted(expr.free_symbols, key=lambda s: s.name)
        self.variables: List[str] = [s.name for s in self.symbols]
        self._compiled = sympy.lambdify(self.symbols, expr, modules=[DUAL_FUNCTIONS, "math"])

    def __call__(self, *args):
        if len(args) != len(self.symbols):
            raise ExpressionError(f"Expression expects {len(self.symbols)} arguments, got {len(args)}")
        return self._compiled(*args)

    def evaluate(self, point: Dict[str, float]) -> Dict:
        """Value plus derivative (one variable) or gradient (several) at a named point."""
        missing = [name for name in self.variables if name not in point]
        if missing:
            raise ExpressionError(f"No value given for {', '.join(missing)}")
        xs = [float(point[name]) for name in self.variables]
        logger.info(f"Differentiating {self.text!r} at {dict(zip(self.variables, xs))}")
        if len(xs) == 1:
            value, slope = value_and_derivative(self, xs[0])
            return {"expression": self.text, "variables": self.variables, "point": xs,
                    "value": float(value), "derivative": float(slope)}
        value, grad = value_and_gradient(self, xs)
        return {"expression": self.text, "variables": self.variables, "point": xs,
                "value": float(value), "gradient": [float(g) for g in grad]}
