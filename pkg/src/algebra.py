import json
import logging
import math
import numbers
from dataclasses import dataclass
from functools import lru_cache
from typing import ClassVar, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.config import Config
from src.errors import AlgebraMismatchError, GradeError, PGAError

logger = logging.getLogger(__name__)

Scalar = Union[int, float, np.floating]


def _popcount(x: int) -> int:
    return bin(x).count("1")


def reorder_sign(a: int, b: int) -> int:
    """Sign picked up when the factors of blade ``a`` followed by blade ``b`` are sorted ascending."""
    a >>= 1
    swaps = 0
    while a:
        swaps += _popcount(a & b)
        a >>= 1
    return -1 if swaps & 1 else 1


@dataclass(frozen=True)
class AlgebraDescriptor:
    """Signature (p, m, z) of a Clifford algebra.

    Degenerate basis vectors come first, so for euclidean PGA ``e0`` is the
    null vector and ``e1 .. en`` square to +1.
    """

    p: int
    m: int
    z: int

    def __post_init__(self):
        if min(self.p, self.m, self.z) < 0:
            raise PGAError(f"Signature counts must be non-negative, got {(self.p, self.m, self.z)}")
        if self.dim > 10:
            raise PGAError(f"Only algebras with at most 10 basis vectors are supported, got {self.dim}")

    @property
    def dim(self) -> int:
        return self.p + self.m + self.z

    @property
    def blade_count(self) -> int:
        return 1 << self.dim

    @property
    def squares(self) -> Tuple[int, ...]:
        return (0,) * self.z + (1,) * self.p + (-1,) * self.m

    @property
    def label(self) -> str:
        return f"Cl({self.p},{self.m},{self.z})"


class Algebra:
    """Multiplication tables for one signature.

    Blades are bitmasks over basis indices (bit i set means e_i is a factor,
    factors in ascending order). Coefficients of a multivector live in a dense
    array indexed by mask.
    """

    def __init__(self, descriptor: AlgebraDescriptor):
        self.descriptor = descriptor
        self.dim = descriptor.dim
        self.blade_count = descriptor.blade_count
        self.pseudoscalar_mask = self.blade_count - 1

        masks = np.arange(self.blade_count)
        self.grades = np.array([_popcount(int(mask)) for mask in masks])
        self.blade_order = sorted(
            range(self.blade_count),
            key=lambda mask: (self.grades[mask], self._indices(mask)),
        )
        self.blade_names = [self._name(mask) for mask in range(self.blade_count)]

        squares = descriptor.squares
        n = self.blade_count
        gp_sign = np.zeros((n, n))
        for a in range(n):
            for b in range(n):
                sign = reorder_sign(a, b)
                common = a & b
                for i in range(self.dim):
                    if common >> i & 1:
                        sign *= squares[i]
                gp_sign[a, b] = sign

        self._gp_index = (masks[:, None] ^ masks[None, :]).ravel()
        for name, table in self.derive_sign_tables(gp_sign).items():
            setattr(self, name, table)

        self._reverse_sign = np.array([(-1) ** (g * (g - 1) // 2) for g in self.grades], dtype=float)
        self._dual_index = self.pseudoscalar_mask ^ masks
        self._dual_sign = np.array(
            [reorder_sign(int(mask), int(self.pseudoscalar_mask ^ mask)) for mask in masks],
            dtype=float,
        )

        logger.debug(f"Built multiplication tables for {descriptor.label} ({n} blades)")

    def derive_sign_tables(self, gp_sign: np.ndarray) -> Dict[str, np.ndarray]:
        """Sign tables for the geometric, outer and inner products from the geometric one."""
        masks = np.arange(self.blade_count)
        result_grade = self.grades[masks[:, None] ^ masks[None, :]]
        disjoint = (masks[:, None] & masks[None, :]) == 0
        lowest = result_grade == np.abs(self.grades[:, None] - self.grades[None, :])
        return {
            "_gp_sign": gp_sign,
            "_outer_sign": np.where(disjoint, gp_sign, 0.0),
            "_inner_sign": np.where(lowest, gp_sign, 0.0),
        }

    def _indices(self, mask: int) -> Tuple[int, ...]:
        return tuple(i for i in range(self.dim) if mask >> i & 1)

    def _name(self, mask: int) -> str:
        if mask == 0:
            return "1"
        return "e" + "".join(str(i) for i in self._indices(mask))

    def __repr__(self) -> str:
        return f"Algebra({self.descriptor.label})"

    def parse_blade(self, name: str) -> Tuple[int, float]:
        """Mask and sign of a blade name; permuted names such as ``e31`` are accepted."""
        name = name.strip()
        if name in ("1", ""):
            return 0, 1.0
        if name == "I":
            return self.pseudoscalar_mask, 1.0
        if not name.startswith("e") or not name[1:].isdigit():
            raise PGAError(f"Invalid blade name: {name!r}")
        indices = [int(ch) for ch in name[1:]]
        if len(set(indices)) != len(indices) or max(indices) >= self.dim:
            raise PGAError(f"Invalid blade name for {self.descriptor.label}: {name!r}")
        mask = 0
        sign = 1
        for i in indices:
            sign *= reorder_sign(mask, 1 << i)
            mask |= 1 << i
        return mask, float(sign)

    def blade(self, name: str, coefficient: float = 1.0) -> "Multivector":
        mask, sign = self.parse_blade(name)
        coeffs = np.zeros(self.blade_count)
        coeffs[mask] = sign * coefficient
        return Multivector(self, coeffs)

    def basis_vector(self, index: int) -> "Multivector":
        if not 0 <= index < self.dim:
            raise GradeError(f"Basis index {index} out of range for {self.descriptor.label}")
        coeffs = np.zeros(self.blade_count)
        coeffs[1 << index] = 1.0
        return Multivector(self, coeffs)

    def scalar(self, value: Scalar) -> "Multivector":
        coeffs = np.zeros(self.blade_count)
        coeffs[0] = value
        return Multivector(self, coeffs)

    def zero(self) -> "Multivector":
        return Multivector(self)

    def pseudoscalar(self) -> "Multivector":
        coeffs = np.zeros(self.blade_count)
        coeffs[self.pseudoscalar_mask] = 1.0
        return Multivector(self, coeffs)

    def masks_of_grade(self, k: int) -> List[int]:
        return [mask for mask in self.blade_order if self.grades[mask] == k]

    def product_array(self, a: np.ndarray, b: np.ndarray, signs: Optional[np.ndarray] = None) -> np.ndarray:
        """Bilinear product of two raw coefficient arrays (geometric by default)."""
        if signs is None:
            signs = self._gp_sign
        weights = (signs * np.outer(a, b)).ravel()
        return np.bincount(self._gp_index, weights=weights, minlength=self.blade_count)

    def cayley_table(self) -> List[List[Tuple[float, int]]]:
        """Basis blade products as (sign, mask) in canonical blade order."""
        table = []
        for a in self.blade_order:
            row = []
            for b in self.blade_order:
                row.append((float(self._gp_sign[a, b]), a ^ b))
            table.append(row)
        return table


@lru_cache(maxsize=None)
def algebra_for(p: int, m: int, z: int) -> Algebra:
    return Algebra(AlgebraDescriptor(p, m, z))


class Multivector:
    """Immutable element of an :class:`Algebra`.

    Operators: ``*`` geometric product, ``^`` outer product, ``|`` inner
    product, ``&`` join (regressive product), ``~`` reverse.
    """

    __slots__ = ("algebra", "coeffs")
    __array_priority__ = 100

    def __init__(self, algebra: Algebra, coeffs: Optional[Sequence[float]] = None):
        if coeffs is None:
            values = np.zeros(algebra.blade_count)
        else:
            values = np.array(coeffs, dtype=float)
            if values.shape != (algebra.blade_count,):
                raise PGAError(
                    f"Expected {algebra.blade_count} coefficients for {algebra.descriptor.label}, "
                    f"got shape {values.shape}"
                )
        values.setflags(write=False)
        self.algebra = algebra
        self.coeffs = values

    def _coerce(self, other) -> "Multivector":
        if isinstance(other, Multivector):
            if other.algebra is not self.algebra and other.algebra.descriptor != self.algebra.descriptor:
                raise AlgebraMismatchError(
                    f"Cannot combine {self.algebra.descriptor.label} with {other.algebra.descriptor.label}"
                )
            return other
        if isinstance(other, numbers.Real):
            return self.algebra.scalar(float(other))
        return NotImplemented

    def _new(self, coeffs: np.ndarray) -> "Multivector":
        return Multivector(self.algebra, coeffs)

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._new(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._new(self.coeffs - other.coeffs)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._new(other.coeffs - self.coeffs)

    def __neg__(self):
        return self._new(-self.coeffs)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            return self._new(self.coeffs * float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._new(self.algebra.product_array(self.coeffs, other.coeffs))

    def __rmul__(self, other):
        if isinstance(other, numbers.Real):
            return self._new(self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, numbers.Real):
            return self._new(self.coeffs / float(other))
        return NotImplemented

    def __xor__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._new(self.algebra.product_array(self.coeffs, other.coeffs, self.algebra._outer_sign))

    def __rxor__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other ^ self

    def __or__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._new(self.algebra.product_array(self.coeffs, other.coeffs, self.algebra._inner_sign))

    def __ror__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other | self

    def __and__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self.dual() ^ other.dual()).undual()

    def __invert__(self):
        return self.reverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, numbers.Integral) or exponent < 0:
            raise PGAError(f"Only non-negative integer powers are supported, got {exponent!r}")
        result = self.algebra.scalar(1.0)
        for _ in range(int(exponent)):
            result = result * self
        return result

    # access

    def __getitem__(self, name: str) -> float:
        mask, sign = self.algebra.parse_blade(name)
        return sign * float(self.coeffs[mask])

    @property
    def scalar(self) -> float:
        return float(self.coeffs[0])

    @property
    def pseudoscalar_weight(self) -> float:
        """Coefficient of the unit pseudoscalar."""
        return float(self.coeffs[self.algebra.pseudoscalar_mask])

    def grade_part(self, k: int) -> "Multivector":
        if not 0 <= k <= self.algebra.dim:
            raise GradeError(f"Grade {k} out of range 0..{self.algebra.dim}")
        return self._new(np.where(self.algebra.grades == k, self.coeffs, 0.0))

    def even(self) -> "Multivector":
        return self._new(np.where(self.algebra.grades % 2 == 0, self.coeffs, 0.0))

    def grades_present(self, tol: float = 0.0) -> List[int]:
        return sorted({int(self.algebra.grades[mask]) for mask in np.flatnonzero(np.abs(self.coeffs) > tol)})

    def grade(self, tol: float = 0.0) -> Optional[int]:
        """The single grade of a homogeneous element, ``None`` for mixed or zero elements."""
        present = self.grades_present(tol)
        return present[0] if len(present) == 1 else None

    def reverse(self) -> "Multivector":
        return self._new(self.coeffs * self.algebra._reverse_sign)

    def dual(self) -> "Multivector":
        out = np.zeros(self.algebra.blade_count)
        out[self.algebra._dual_index] = self.coeffs * self.algebra._dual_sign
        return self._new(out)

    def undual(self) -> "Multivector":
        return self._new(self.algebra._dual_sign * self.coeffs[self.algebra._dual_index])

    def norm(self) -> float:
        return math.sqrt(abs((self * self.reverse()).scalar))

    def ideal_norm(self) -> float:
        return self.dual().norm()

    def inverse(self) -> "Multivector":
        """Inverse of a versor, whose product with its reverse is a nonzero scalar."""
        square = self * self.reverse()
        rest = square.coeffs.copy()
        rest[0] = 0.0
        if abs(square.scalar) <= Config.TOLERANCE or np.max(np.abs(rest)) > Config.GEOMETRY_TOLERANCE * max(1.0, abs(square.scalar)):
            raise PGAError("Element is not an invertible versor")
        return self.reverse() / square.scalar

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def isclose(self, other, tol: float = Config.TOLERANCE) -> bool:
        other = self._coerce(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= tol)

    def max_abs_diff(self, other) -> float:
        other = self._coerce(other)
        return float(np.max(np.abs(self.coeffs - other.coeffs)))

    # serialization

    def to_pairs(self, include_zero: bool = False) -> List[List]:
        pairs = []
        for mask in self.algebra.blade_order:
            value = float(self.coeffs[mask])
            if include_zero or value != 0.0:
                pairs.append([self.algebra.blade_names[mask], value])
        return pairs

    @classmethod
    def from_pairs(cls, algebra: Algebra, pairs: Sequence[Sequence]) -> "Multivector":
        coeffs = np.zeros(algebra.blade_count)
        for name, value in pairs:
            mask, sign = algebra.parse_blade(str(name))
            coeffs[mask] += sign * float(value)
        return cls(algebra, coeffs)

    def to_json(self) -> str:
        return json.dumps(self.to_pairs())

    @classmethod
    def from_json(cls, algebra: Algebra, text: str) -> "Multivector":
        return cls.from_pairs(algebra, json.loads(text))

    def __repr__(self) -> str:
        terms = []
        for name, value in self.to_pairs():
            terms.append(f"{value:g}" if name == "1" else f"{value:g}*{name}")
        body = " + ".join(terms) if terms else "0"
        return f"Multivector[{self.algebra.descriptor.label}]({body})"


def _check_same(a: Multivector, b: Multivector):
    if a.algebra is not b.algebra and a.algebra.descriptor != b.algebra.descriptor:
        raise AlgebraMismatchError(
            f"Cannot combine {a.algebra.descriptor.label} with {b.algebra.descriptor.label}"
        )


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    _check_same(a, b)
    return a * b


def outer_product(a: Multivector, b: Multivector) -> Multivector:
    _check_same(a, b)
    return a ^ b


def inner_product(a: Multivector, b: Multivector) -> Multivector:
    """Lowest-grade part <ab>_|k-m| per pair of grades, extended bilinearly."""
    _check_same(a, b)
    return a | b


def grade_part(a: Multivector, k: int) -> Multivector:
    return a.grade_part(k)


def reverse(a: Multivector) -> Multivector:
    return a.reverse()


def poincare_dual(a: Multivector) -> Multivector:
    """Blade complement, signed so that ``blade ^ dual(blade) = +I``."""
    return a.dual()


def poincare_undual(a: Multivector) -> Multivector:
    return a.undual()


def regressive_product(a: Multivector, b: Multivector) -> Multivector:
    _check_same(a, b)
    return a & b


def commutator(a: Multivector, b: Multivector) -> Multivector:
    """Lie bracket (ab - ba) / 2."""
    _check_same(a, b)
    return (a * b - b * a) * 0.5


def cross(a: Multivector, b: Multivector) -> Multivector:
    """Grade-2 part of the geometric product, <ab>_2."""
    _check_same(a, b)
    return (a * b).grade_part(2)


def sandwich(g: Multivector, x: Multivector) -> Multivector:
    _check_same(g, x)
    return g * x * g.reverse()


def exp_series(a: Multivector, terms: int = Config.EXP_SERIES_TERMS) -> Multivector:
    """Truncated power series sum_{k < terms} a^k / k!."""
    if terms < 1:
        raise PGAError(f"terms must be >= 1, got {terms}")
    term = a.algebra.scalar(1.0)
    total = term
    for k in range(1, terms):
        term = (term * a) / k
        total = total + term
    return total


PGA2D = algebra_for(2, 0, 1)
PGA3D = algebra_for(3, 0, 1)


@dataclass(frozen=True)
class Element:
    """Grade-tagged view of a multivector in a fixed algebra.

    Subclasses set ``ALGEBRA`` and ``GRADES``; stray coefficients of other
    grades above tolerance are rejected and the remainder is projected away.
    """

    mv: Multivector

    ALGEBRA: ClassVar[Optional[Algebra]] = None
    GRADES: ClassVar[Tuple[int, ...]] = ()

    def __post_init__(self):
        if not isinstance(self.mv, Multivector):
            raise PGAError(f"{type(self).__name__} wraps a Multivector, got {type(self.mv).__name__}")
        if self.ALGEBRA is not None and self.mv.algebra is not self.ALGEBRA:
            raise AlgebraMismatchError(
                f"{type(self).__name__} lives in {self.ALGEBRA.descriptor.label}, "
                f"got {self.mv.algebra.descriptor.label}"
            )
        if self.GRADES:
            keep = np.isin(self.mv.algebra.grades, self.GRADES)
            stray = np.abs(np.where(keep, 0.0, self.mv.coeffs))
            scale = max(1.0, float(np.max(np.abs(self.mv.coeffs))))
            if np.max(stray) > Config.GEOMETRY_TOLERANCE * scale:
                raise GradeError(
                    f"{type(self).__name__} needs grades {self.GRADES}, got {self.mv.grades_present(Config.TOLERANCE)}"
                )
            object.__setattr__(self, "mv", Multivector(self.mv.algebra, np.where(keep, self.mv.coeffs, 0.0)))

    def norm(self) -> float:
        return self.mv.norm()

    def ideal_norm(self) -> float:
        return self.mv.ideal_norm()

    def is_zero(self, tol: float = Config.TOLERANCE) -> bool:
        return self.mv.is_zero(tol)

    def __neg__(self):
        return type(self)(-self.mv)

    def scaled(self, factor: float):
        return type(self)(self.mv * factor)

    def to_pairs(self) -> List[List]:
        return self.mv.to_pairs()
