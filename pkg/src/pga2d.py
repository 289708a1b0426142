"""Euclidean plane geometry in Cl(2,0,1).

Coordinate conventions:
    line ax + by + c = 0   ->  c*e0 + a*e1 + b*e2
    point (x, y)           ->  E0 + x*E1 + y*E2   with E0 = e12, E1 = e20, E2 = e01
    direction (x, y)       ->  x*E1 + y*E2

Motors act through :func:`apply`, ``apply(m, X) = ~m X m``. Under it a
positive rotor angle turns counter-clockwise and ``apply(m2, apply(m1, X))``
equals ``apply(compose(m1, m2), X)``.
"""
import logging
import math
from typing import Tuple, Union

import numpy as np

from src.algebra import PGA2D, Element, cross, sandwich
from src.config import Config
from src.errors import (
    DependentArgumentsError,
    IdealElementError,
    NotNormalizedError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

E0 = PGA2D.blade("e12")
E1 = PGA2D.blade("e20")
E2 = PGA2D.blade("e01")
I = PGA2D.pseudoscalar()

# Product-table labels in canonical blade order (1, e0, e1, e2, e01, e02, e12, e012)
# with the sign relating the label to the canonical blade.
LABELS = {
    "1": ("1", 1.0),
    "e0": ("e0", 1.0),
    "e1": ("e1", 1.0),
    "e2": ("e2", 1.0),
    "e01": ("E2", 1.0),
    "e02": ("E1", -1.0),
    "e12": ("E0", 1.0),
    "e012": ("I", 1.0),
}
LABEL_ORDER = ["1", "e0", "e1", "e2", "E0", "E1", "E2", "I"]


class Line2(Element):
    ALGEBRA = PGA2D
    GRADES = (1,)

    @property
    def a(self) -> float:
        return self.mv["e1"]

    @property
    def b(self) -> float:
        return self.mv["e2"]

    @property
    def c(self) -> float:
        return self.mv["e0"]

    def is_ideal(self, tol: float = Config.TOLERANCE) -> bool:
        return math.hypot(self.a, self.b) <= tol

    def is_normalized(self, tol: float = Config.NORMALIZATION_TOLERANCE) -> bool:
        return abs((self.mv * self.mv).scalar - 1.0) <= tol


class Point2(Element):
    ALGEBRA = PGA2D
    GRADES = (2,)

    @property
    def weight(self) -> float:
        return self.mv["e12"]

    def is_ideal(self, tol: float = Config.TOLERANCE) -> bool:
        return abs(self.weight) <= tol

    def is_normalized(self, tol: float = Config.NORMALIZATION_TOLERANCE) -> bool:
        return abs((self.mv * self.mv).scalar + 1.0) <= tol

    def coordinates(self) -> Tuple[float, float]:
        """Cartesian (x, y) of a euclidean point; direction (x, y) of an ideal one."""
        x, y = self.mv["e20"], self.mv["e01"]
        if self.is_ideal():
            return x, y
        return x / self.weight, y / self.weight


class Motor2(Element):
    ALGEBRA = PGA2D
    GRADES = (0, 2)

    def normalized(self) -> "Motor2":
        square = (self.mv * self.mv.reverse()).scalar
        if square <= Config.TOLERANCE:
            raise NotNormalizedError("Motor has zero norm and cannot be normalized")
        return Motor2(self.mv / math.sqrt(square))

    def is_normalized(self, tol: float = Config.NORMALIZATION_TOLERANCE) -> bool:
        return (self.mv * self.mv.reverse()).isclose(1.0, tol)

    def angle(self) -> float:
        """Rotation angle implemented by the motor, in [0, 2*pi]."""
        return 2.0 * math.atan2(abs(self.mv["e12"]), self.mv.scalar)


Geometry2 = Union[Point2, Line2]


def line(a: float, b: float, c: float) -> Line2:
    if a == 0 and b == 0 and c == 0:
        raise PreconditionError("line(a, b, c) needs at least one nonzero coefficient")
    return Line2(c * PGA2D.blade("e0") + a * PGA2D.blade("e1") + b * PGA2D.blade("e2"))


def point(x: float, y: float) -> Point2:
    return Point2(E0 + x * E1 + y * E2)


def direction(x: float, y: float) -> Point2:
    if x == 0 and y == 0:
        raise PreconditionError("direction(x, y) needs a nonzero vector")
    return Point2(x * E1 + y * E2)


def require_nonzero(x: Element, what: str = "construction") -> Element:
    if x.is_zero(Config.TOLERANCE):
        raise DependentArgumentsError(f"Dependent arguments: {what} is zero")
    return x


def ideal_norm(x: Geometry2) -> float:
    return x.ideal_norm()


def normalize(x: Geometry2) -> Geometry2:
    """Scale a point to weight 1 or a line to unit norm; ideal elements to unit ideal norm."""
    norm = x.norm()
    if norm > Config.TOLERANCE:
        if isinstance(x, Point2):
            return Point2(x.mv / x.weight)
        return type(x)(x.mv / norm)
    inf_norm = x.ideal_norm()
    if inf_norm <= Config.TOLERANCE:
        raise DependentArgumentsError(f"Cannot normalize a zero {type(x).__name__}")
    return type(x)(x.mv / inf_norm)


def _require_line(a: Line2, name: str = "line"):
    if a.is_ideal():
        raise IdealElementError(f"{name} must be euclidean")
    if not a.is_normalized():
        raise NotNormalizedError(f"{name} must be normalized (a^2 = 1), got {(a.mv * a.mv).scalar!r}")


def _require_point(p: Point2, name: str = "point"):
    if p.is_ideal():
        raise IdealElementError(f"{name} must be euclidean")
    if not p.is_normalized():
        raise NotNormalizedError(f"{name} must be normalized (P^2 = -1), got {(p.mv * p.mv).scalar!r}")


def meet(a: Line2, b: Line2) -> Point2:
    """Intersection point a ^ b; zero for identical lines, ideal for parallel ones."""
    return Point2(a.mv ^ b.mv)


def join(p: Point2, q: Point2) -> Line2:
    """Joining line P v Q; zero for coincident points."""
    return Line2(p.mv & q.mv)


def angle(a: Line2, b: Line2) -> float:
    _require_line(a, "a")
    _require_line(b, "b")
    return math.acos(float(np.clip((a.mv | b.mv).scalar, -1.0, 1.0)))


def angle_wedge(a: Line2, b: Line2) -> float:
    """Angle in [0, pi/2] from the weight of the intersection point."""
    _require_line(a, "a")
    _require_line(b, "b")
    return math.asin(float(np.clip((a.mv ^ b.mv).norm(), 0.0, 1.0)))


def dist_point_point(p: Point2, q: Point2) -> float:
    _require_point(p, "p")
    _require_point(q, "q")
    return (p.mv & q.mv).norm()


def dist_point_point_ideal(p: Point2, q: Point2) -> float:
    """Same distance read off the ideal norm of P x Q."""
    _require_point(p, "p")
    _require_point(q, "q")
    return cross(p.mv, q.mv).ideal_norm()


def perp_direction_join(p: Point2, q: Point2) -> Point2:
    """Ideal point P x Q, perpendicular to the line PQ."""
    return Point2(cross(p.mv, q.mv))


def dist_point_line(p: Point2, a: Line2) -> float:
    """Oriented distance: the pseudoscalar weight of a ^ P."""
    _require_point(p, "p")
    _require_line(a, "a")
    return (a.mv ^ p.mv).pseudoscalar_weight


def dist_parallel_lines(a: Line2, b: Line2) -> float:
    _require_line(a, "a")
    _require_line(b, "b")
    wedge = a.mv ^ b.mv
    if abs(wedge["e12"]) > Config.GEOMETRY_TOLERANCE:
        raise PreconditionError("dist_parallel_lines needs parallel lines")
    return wedge.ideal_norm()


def angle_ideal_point_line(a: Line2, v: Point2) -> float:
    """Angle between a line and a unit direction, sin^-1 of the ideal norm of a ^ V."""
    _require_line(a, "a")
    if not v.is_ideal():
        raise PreconditionError("angle_ideal_point_line needs an ideal point")
    if abs(v.ideal_norm() - 1.0) > Config.NORMALIZATION_TOLERANCE:
        raise NotNormalizedError("direction must have unit ideal norm")
    return math.asin(float(np.clip((a.mv ^ v.mv).ideal_norm(), 0.0, 1.0)))


def perp_through(p: Point2, a: Line2) -> Line2:
    """Line through P perpendicular to a: P . a"""
    _require_point(p, "p")
    _require_line(a, "a")
    return Line2(p.mv | a.mv)


def nearest_point(p: Point2, a: Line2) -> Point2:
    """Foot of the perpendicular from P on a: (P . a) a"""
    _require_point(p, "p")
    _require_line(a, "a")
    return Point2(((p.mv | a.mv) * a.mv).grade_part(2))


def parallel_through(p: Point2, a: Line2) -> Line2:
    """Line through P parallel to a: (P . a) P"""
    _require_point(p, "p")
    _require_line(a, "a")
    return Line2(((p.mv | a.mv) * p.mv).grade_part(1))


def triangle_area(a: Point2, b: Point2, c: Point2) -> float:
    for name, p in (("a", a), ("b", b), ("c", c)):
        _require_point(p, name)
    return 0.5 * abs((a.mv & b.mv & c.mv).scalar)


def project_line_onto_line(m: Line2, n: Line2) -> Line2:
    """(m . n) n, the part of m along n; with the rejection it sums back to m."""
    _require_line(n, "n")
    return Line2(((m.mv | n.mv) * n.mv).grade_part(1))


def reject_line_from_line(m: Line2, n: Line2) -> Line2:
    _require_line(n, "n")
    return Line2(((m.mv ^ n.mv) * n.mv).grade_part(1))


def project_line_onto_point(m: Line2, p: Point2) -> Line2:
    """-(m . P) P, the line through P parallel to m."""
    _require_point(p, "p")
    return Line2(-((m.mv | p.mv) * p.mv).grade_part(1))


def reject_line_from_point(m: Line2, p: Point2) -> Line2:
    _require_point(p, "p")
    return Line2(-((m.mv ^ p.mv) * p.mv).grade_part(1))


def reflect(a: Line2, x: Geometry2) -> Geometry2:
    """a X a; points come back with their weight negated."""
    _require_line(a, "mirror")
    return type(x)(sandwich(a.mv, x.mv))


def rotor(center: Point2, alpha: float) -> Motor2:
    """Counter-clockwise rotation by alpha about a normalized euclidean point."""
    _require_point(center, "center")
    return Motor2(math.cos(alpha / 2.0) + math.sin(alpha / 2.0) * center.mv)


def translator(direction_point: Point2, d: float) -> Motor2:
    """1 + (d/2) V for a unit ideal point V.

    Under :func:`apply` it moves points by d along V turned clockwise by a
    right angle (V = E1 moves by (0, -d)).
    """
    if not direction_point.is_ideal():
        raise PreconditionError("translator needs an ideal point")
    if abs(direction_point.ideal_norm() - 1.0) > Config.NORMALIZATION_TOLERANCE:
        raise NotNormalizedError("translator direction must have unit ideal norm")
    return Motor2(1.0 + (d / 2.0) * direction_point.mv)


def translation(dx: float, dy: float) -> Motor2:
    """Motor moving every point by (dx, dy) under :func:`apply`."""
    return Motor2(1.0 + 0.5 * (-dy * E1 + dx * E2))


def motor_from_lines(a: Line2, b: Line2) -> Motor2:
    """ab: reflection in a followed by reflection in b."""
    return Motor2(a.mv * b.mv)


def compose(first: Motor2, second: Motor2) -> Motor2:
    return Motor2(first.mv * second.mv)


def apply(m: Motor2, x: Geometry2) -> Geometry2:
    return type(x)(m.mv.reverse() * x.mv * m.mv)

