"""Euclidean space geometry in Cl(3,0,1).

Coordinate conventions:
    plane ax + by + cz + d = 0  ->  d*e0 + a*e1 + b*e2 + c*e3
    point (x, y, z)             ->  E0 + x*E1 + y*E2 + z*E3
                                    E0 = e123, E1 = e032, E2 = e013, E3 = e021
    line bivector coordinates   ->  [w01, w02, w03, w23, w31, w12]

With these signs ``plane ^ point = (ax + by + cz + d) I`` and the join of the
origin with the +z direction is ``e12``. Motors act through :func:`apply`
(``~m X m``); a positive angle turns counter-clockwise about the axis
direction and a positive pitch advances along it.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.algebra import PGA3D, Element, Multivector, cross, sandwich
from src.config import Config
from src.errors import (
    BranchError,
    DegeneratePencilError,
    DependentArgumentsError,
    IdealElementError,
    NotNormalizedError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

E0 = PGA3D.blade("e123")
E1 = PGA3D.blade("e032")
E2 = PGA3D.blade("e013")
E3 = PGA3D.blade("e021")
I = PGA3D.pseudoscalar()

X_AXIS = PGA3D.blade("e23")
Y_AXIS = PGA3D.blade("e31")
Z_AXIS = PGA3D.blade("e12")

BIVECTOR_BLADES = ("e01", "e02", "e03", "e23", "e31", "e12")
EVEN_BLADES = ("1", "e01", "e02", "e03", "e23", "e31", "e12", "e0123")

_BIVECTOR_MASKS = [PGA3D.parse_blade(name) for name in BIVECTOR_BLADES]
_EVEN_MASKS = [PGA3D.parse_blade(name) for name in EVEN_BLADES]

BIVECTOR_INDEX = np.array([mask for mask, _ in _BIVECTOR_MASKS])
BIVECTOR_SIGN = np.array([sign for _, sign in _BIVECTOR_MASKS])
EVEN_INDEX = np.array([mask for mask, _ in _EVEN_MASKS])
EVEN_SIGN = np.array([sign for _, sign in _EVEN_MASKS])

# Below this rotation magnitude the closed forms switch to their Taylor expansions
_SERIES_THRESHOLD = 1e-4
_BRANCH_TOLERANCE = 1e-7


def bivector_coords(mv: Multivector) -> np.ndarray:
    return BIVECTOR_SIGN * mv.coeffs[BIVECTOR_INDEX]


def bivector_from_coords(coords: Sequence[float]) -> Multivector:
    values = np.zeros(PGA3D.blade_count)
    values[BIVECTOR_INDEX] = BIVECTOR_SIGN * np.asarray(coords, dtype=float)
    return Multivector(PGA3D, values)


def even_coords(mv: Multivector) -> np.ndarray:
    return EVEN_SIGN * mv.coeffs[EVEN_INDEX]


def even_from_coords(coords: Sequence[float]) -> Multivector:
    values = np.zeros(PGA3D.blade_count)
    values[EVEN_INDEX] = EVEN_SIGN * np.asarray(coords, dtype=float)
    return Multivector(PGA3D, values)


class Plane(Element):
    ALGEBRA = PGA3D
    GRADES = (1,)

    @property
    def normal(self) -> np.ndarray:
        return np.array([self.mv["e1"], self.mv["e2"], self.mv["e3"]])

    @property
    def offset(self) -> float:
        return self.mv["e0"]

    def is_ideal(self, tol: float = Config.TOLERANCE) -> bool:
        return float(np.linalg.norm(self.normal)) <= tol

    def is_normalized(self, tol: float = Config.NORMALIZATION_TOLERANCE) -> bool:
        return abs((self.mv * self.mv).scalar - 1.0) <= tol


class Line3(Element):
    ALGEBRA = PGA3D
    GRADES = (2,)

    @property
    def coords(self) -> np.ndarray:
        return bivector_coords(self.mv)

    @property
    def direction(self) -> np.ndarray:
        """Euclidean part (w23, w31, w12); the direction vector of a line."""
        return self.coords[3:]

    @property
    def moment(self) -> np.ndarray:
        """Ideal part (w01, w02, w03)."""
        return self.coords[:3]

    def is_ideal(self, tol: float = Config.TOLERANCE) -> bool:
        return float(np.linalg.norm(self.direction)) <= tol

    def is_normalized(self, tol: float = Config.NORMALIZATION_TOLERANCE) -> bool:
        return (self.mv * self.mv).isclose(-1.0, tol)


class Point3(Element):
    ALGEBRA = PGA3D
    GRADES = (3,)

    @property
    def weight(self) -> float:
        return self.mv["e123"]

    def is_ideal(self, tol: float = Config.TOLERANCE) -> bool:
        return abs(self.weight) <= tol

    def is_normalized(self, tol: float = Config.NORMALIZATION_TOLERANCE) -> bool:
        return abs((self.mv * self.mv).scalar + 1.0) <= tol

    def coordinates(self) -> np.ndarray:
        """Cartesian position of a euclidean point; the direction of an ideal one."""
        xyz = np.array([self.mv["e032"], self.mv["e013"], self.mv["e021"]])
        if self.is_ideal():
            return xyz
        return xyz / self.weight


class Motor3(Element):
    ALGEBRA = PGA3D
    GRADES = (0, 2, 4)

    def normalized(self) -> "Motor3":
        return normalize_motor(self)

    def is_normalized(self, tol: float = Config.NORMALIZATION_TOLERANCE) -> bool:
        return (self.mv * self.mv.reverse()).isclose(1.0, tol)

    def coords(self) -> np.ndarray:
        return even_coords(self.mv)


Geometry3 = Union[Plane, Line3, Point3]


@dataclass(frozen=True)
class ScrewDecomposition:
    """B = (alpha + beta I) axis with a normalized euclidean axis."""

    axis: Line3
    alpha: float
    beta: float
    translation_only: bool = False

    @property
    def pitch(self) -> float:
        if self.alpha == 0.0:
            return math.inf
        return self.beta / self.alpha

    def bivector(self) -> Multivector:
        return (self.alpha + self.beta * I) * self.axis.mv


@dataclass(frozen=True)
class LinePairProduct:
    """Graded parts of the product of two normalized lines and the invariants read off them.

    cos_alpha = -<ab>_0, d_sin_alpha = -<ab>_4 weight; alpha in [0, pi] is the angle
    between the line directions and d the signed distance along the common normal.
    """

    grade0: float
    grade2: Multivector
    grade4: float
    cos_alpha: float
    d_sin_alpha: float
    alpha: float
    d: float
    common_normal: Optional[Line3]

    @property
    def parallel(self) -> bool:
        return self.common_normal is None


@dataclass(frozen=True)
class KaleidoscopeOrbit:
    versors: List[Multivector]
    images: List[Element]
    closure_error: float
    k: Optional[int] = None

    def __len__(self) -> int:
        return len(self.versors)


# constructors


def plane(a: float, b: float, c: float, d: float) -> Plane:
    if a == 0 and b == 0 and c == 0 and d == 0:
        raise PreconditionError("plane(a, b, c, d) needs at least one nonzero coefficient")
    return Plane(d * PGA3D.blade("e0") + a * PGA3D.blade("e1") + b * PGA3D.blade("e2") + c * PGA3D.blade("e3"))


def point3(x: float, y: float, z: float) -> Point3:
    return Point3(E0 + x * E1 + y * E2 + z * E3)


def direction3(x: float, y: float, z: float) -> Point3:
    if x == 0 and y == 0 and z == 0:
        raise PreconditionError("direction3(x, y, z) needs a nonzero vector")
    return Point3(x * E1 + y * E2 + z * E3)


def line_through(p: Point3, q: Point3) -> Line3:
    """P v Q; with q ideal this is the line through P with direction q."""
    return Line3(p.mv & q.mv)


def line_meet(a: Plane, b: Plane) -> Line3:
    return Line3(a.mv ^ b.mv)


def line_from_coords(coords: Sequence[float]) -> Line3:
    return Line3(bivector_from_coords(coords))


def line_from_point_direction(p: Sequence[float], u: Sequence[float]) -> Line3:
    """Line through p oriented along u: coordinates [p x u, u], normalized when u is a unit vector."""
    p = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=float)
    if not np.linalg.norm(u) > Config.TOLERANCE:
        raise PreconditionError("line_from_point_direction needs a nonzero direction")
    return line_from_coords(np.concatenate([np.cross(p, u), u]))


def require_nonzero(x: Element, what: str = "construction") -> Element:
    if x.is_zero(Config.TOLERANCE):
        raise DependentArgumentsError(f"Dependent arguments: {what} is zero")
    return x


def normalize(x: Geometry3) -> Geometry3:
    norm = x.norm()
    if norm > Config.TOLERANCE:
        if isinstance(x, Point3):
            return Point3(x.mv / x.weight)
        return type(x)(x.mv / norm)
    inf_norm = x.ideal_norm()
    if inf_norm <= Config.TOLERANCE:
        raise DependentArgumentsError(f"Cannot normalize a zero {type(x).__name__}")
    return type(x)(x.mv / inf_norm)


def is_simple(line: Union[Line3, Multivector], tol: float = Config.GEOMETRY_TOLERANCE) -> bool:
    mv = line.mv if isinstance(line, Element) else line
    scale = float(np.sum(mv.coeffs ** 2))
    return abs((mv ^ mv).pseudoscalar_weight) <= tol * max(scale, Config.TOLERANCE)


def _require_plane(a: Plane, name: str = "plane"):
    if a.is_ideal():
        raise IdealElementError(f"{name} must be euclidean")
    if not a.is_normalized():
        raise NotNormalizedError(f"{name} must be normalized (a^2 = 1), got {(a.mv * a.mv).scalar!r}")


def _require_point(p: Point3, name: str = "point"):
    if p.is_ideal():
        raise IdealElementError(f"{name} must be euclidean")
    if not p.is_normalized():
        raise NotNormalizedError(f"{name} must be normalized (P^2 = -1), got {(p.mv * p.mv).scalar!r}")


def _require_line(line: Line3, name: str = "line"):
    if line.is_ideal():
        raise IdealElementError(f"{name} must be euclidean")
    if not is_simple(line):
        raise PreconditionError(f"{name} is not a simple bivector")
    if not line.is_normalized():
        raise NotNormalizedError(f"{name} must be normalized (L^2 = -1), got {(line.mv * line.mv).scalar!r}")


# Constructions between planes, lines and points


def angle_planes(a: Plane, b: Plane) -> float:
    _require_plane(a, "a")
    _require_plane(b, "b")
    return math.acos(float(np.clip((a.mv | b.mv).scalar, -1.0, 1.0)))


def angle_planes_wedge(a: Plane, b: Plane) -> float:
    """Angle in [0, pi/2] from the norm of the intersection line."""
    _require_plane(a, "a")
    _require_plane(b, "b")
    return math.asin(float(np.clip((a.mv ^ b.mv).norm(), 0.0, 1.0)))


def dist_parallel_planes(a: Plane, b: Plane) -> float:
    _require_plane(a, "a")
    _require_plane(b, "b")
    wedge = a.mv ^ b.mv
    if wedge.norm() > Config.GEOMETRY_TOLERANCE:
        raise PreconditionError("dist_parallel_planes needs parallel planes")
    return wedge.ideal_norm()


def meet3(a: Plane, b: Plane, c: Plane) -> Point3:
    return Point3(a.mv ^ b.mv ^ c.mv)


def join3(p: Point3, q: Point3, r: Point3) -> Plane:
    return Plane(p.mv & q.mv & r.mv)


def dist_point_plane(p: Point3, a: Plane) -> float:
    """Oriented distance, the pseudoscalar weight of a ^ P."""
    _require_point(p, "p")
    _require_plane(a, "a")
    return (a.mv ^ p.mv).pseudoscalar_weight


def angle_ideal_point_plane(a: Plane, v: Point3) -> float:
    _require_plane(a, "a")
    if not v.is_ideal():
        raise PreconditionError("angle_ideal_point_plane needs an ideal point")
    if abs(v.ideal_norm() - 1.0) > Config.NORMALIZATION_TOLERANCE:
        raise NotNormalizedError("direction must have unit ideal norm")
    return math.asin(float(np.clip((a.mv ^ v.mv).ideal_norm(), 0.0, 1.0)))


def perp_direction_join(p: Point3, q: Point3) -> Line3:
    """P x Q, the ideal line perpendicular to the join of P and Q."""
    return Line3(cross(p.mv, q.mv))


def dist_point_point(p: Point3, q: Point3) -> float:
    _require_point(p, "p")
    _require_point(q, "q")
    return (p.mv & q.mv).norm()


def dist_point_point_ideal(p: Point3, q: Point3) -> float:
    _require_point(p, "p")
    _require_point(q, "q")
    return cross(p.mv, q.mv).ideal_norm()


def perp_line_point_plane(p: Point3, a: Plane) -> Line3:
    """P . a, the line through P perpendicular to a."""
    _require_point(p, "p")
    _require_plane(a, "a")
    return Line3(p.mv | a.mv)


def nearest_point_on_plane(p: Point3, a: Plane) -> Point3:
    _require_point(p, "p")
    _require_plane(a, "a")
    return Point3(((p.mv | a.mv) * a.mv).grade_part(3))


def parallel_plane_through_point(p: Point3, a: Plane) -> Plane:
    _require_point(p, "p")
    _require_plane(a, "a")
    return Plane(((p.mv | a.mv) * p.mv).grade_part(1))


def perp_plane_line_plane(line: Line3, a: Plane) -> Plane:
    """Omega . a, the plane through the line perpendicular to a."""
    _require_line(line, "line")
    _require_plane(a, "a")
    return Plane(line.mv | a.mv)


def meet_line_plane(line: Line3, a: Plane) -> Point3:
    return Point3(line.mv ^ a.mv)


def join_point_line(p: Point3, line: Line3) -> Plane:
    return Plane(p.mv & line.mv)


def perp_plane_point_line(p: Point3, line: Line3) -> Plane:
    """P . Omega, the plane through P perpendicular to the line."""
    _require_point(p, "p")
    _require_line(line, "line")
    return Plane(p.mv | line.mv)


def nearest_point_on_line(p: Point3, line: Line3) -> Point3:
    _require_point(p, "p")
    _require_line(line, "line")
    return Point3(((p.mv | line.mv) * line.mv).grade_part(3))


def parallel_line_through_point(p: Point3, line: Line3) -> Line3:
    _require_point(p, "p")
    _require_line(line, "line")
    return Line3(((p.mv | line.mv) * p.mv).grade_part(2))


def perp_line_through_point(p: Point3, line: Line3) -> Line3:
    """((P . Omega) Omega) v P, the line through P meeting the line at a right angle."""
    foot = nearest_point_on_line(p, line)
    return Line3(foot.mv & p.mv)


def normal_line_through(p: Point3, a: Plane) -> Line3:
    """((a . P) ^ a) v P: the line through P that meets the plane orthogonally."""
    _require_point(p, "p")
    _require_plane(a, "a")
    foot = (a.mv | p.mv) ^ a.mv
    return Line3(foot & p.mv)


def tetra_volume(a: Point3, b: Point3, c: Point3, d: Point3) -> float:
    for name, p in (("a", a), ("b", b), ("c", c), ("d", d)):
        _require_point(p, name)
    return abs((a.mv & b.mv & c.mv & d.mv).scalar) / 6.0


def reflect3(a: Plane, x: Geometry3) -> Geometry3:
    """a X a for a point, line or plane X."""
    _require_plane(a, "mirror")
    return type(x)(sandwich(a.mv, x.mv))


def polar(line: Line3) -> Line3:
    """Orthogonal complement -Omega I, an ideal line."""
    return Line3(-(line.mv * I))


def half_turn(line: Line3, x: Geometry3) -> Geometry3:
    """Turn by pi about a normalized euclidean line: Omega X ~Omega."""
    _require_line(line, "axis")
    return type(x)(sandwich(line.mv, x.mv))


# motors


def apply(m: Motor3, x: Geometry3) -> Geometry3:
    return type(x)(m.mv.reverse() * x.mv * m.mv)


def compose(first: Motor3, second: Motor3) -> Motor3:
    return Motor3(first.mv * second.mv)


def normalize_motor(m: Motor3) -> Motor3:
    """Scale so that m ~m = 1 exactly; m ~m = a + b I is corrected by (1 - b/(2a) I)/sqrt(a)."""
    square = m.mv * m.mv.reverse()
    a = square.scalar
    if a <= Config.TOLERANCE:
        raise NotNormalizedError("Motor with vanishing scalar norm cannot be normalized")
    b = square.pseudoscalar_weight
    return Motor3(m.mv * ((1.0 - (b / (2.0 * a)) * I) / math.sqrt(a)))


def split_bivector(bivector: Union[Line3, Multivector]) -> ScrewDecomposition:
    mv = bivector.mv if isinstance(bivector, Element) else bivector.grade_part(2)
    coords = bivector_coords(mv)
    alpha = float(np.linalg.norm(coords[3:]))
    if alpha <= Config.TOLERANCE:
        beta = float(np.linalg.norm(coords[:3]))
        if beta <= Config.TOLERANCE:
            raise PreconditionError("Cannot split the zero bivector")
        t = coords[:3] / beta
        axis = Line3(bivector_from_coords([0.0, 0.0, 0.0, -t[0], -t[1], -t[2]]))
        return ScrewDecomposition(axis=axis, alpha=0.0, beta=beta, translation_only=True)
    q = (mv * mv).pseudoscalar_weight
    beta = -q / (2.0 * alpha)
    axis = Line3(mv * (1.0 / alpha - (beta / alpha ** 2) * I))
    return ScrewDecomposition(axis=axis, alpha=alpha, beta=beta)


def exp_bivector(bivector: Union[Line3, Multivector]) -> Motor3:
    """Closed-form exponential of a bivector, valid for simple and non-simple arguments."""
    mv = bivector.mv if isinstance(bivector, Element) else bivector.grade_part(2)
    square = mv * mv
    alpha = math.sqrt(max(-square.scalar, 0.0))
    u = -0.5 * square.pseudoscalar_weight
    if alpha < _SERIES_THRESHOLD:
        a2 = alpha * alpha
        sinc = 1.0 - a2 / 6.0 + a2 * a2 / 120.0
        c2 = -1.0 / 3.0 + a2 / 30.0
    else:
        sinc = math.sin(alpha) / alpha
        c2 = (math.cos(alpha) - sinc) / (alpha * alpha)
    result = math.cos(alpha) + sinc * mv + (u * c2) * (mv * I) - (u * sinc) * I
    return Motor3(result)


def log_motor(m: Motor3) -> Multivector:
    """Principal logarithm, the bivector B with exp(B) = m and rotational part of magnitude in [0, pi)."""
    if not m.is_normalized():
        raise NotNormalizedError("log_motor needs a normalized motor (m ~m = 1)")
    a = m.mv.scalar
    b = m.mv.grade_part(2)
    c = m.mv.pseudoscalar_weight
    s = float(np.linalg.norm(bivector_coords(b)[3:]))
    alpha = math.atan2(s, a)
    if alpha > math.pi - _BRANCH_TOLERANCE:
        raise BranchError("Motor is at -1 (a full turn); no principal logarithm")
    if alpha < _SERIES_THRESHOLD:
        a2 = alpha * alpha
        ratio = 1.0 + a2 / 6.0
        f = 1.0 / 3.0 + 2.0 * a2 / 15.0
    else:
        sin_a = math.sin(alpha)
        ratio = alpha / sin_a
        f = (1.0 - alpha * math.cos(alpha) / sin_a) / (sin_a * sin_a)
    return (ratio * b - (c * f) * (I * b)).grade_part(2)


def rotor3(axis: Line3, angle: float) -> Motor3:
    """Rotation by angle about a normalized euclidean line."""
    _require_line(axis, "axis")
    return exp_bivector((angle / 2.0) * axis.mv)


def translator3(direction_vector: Sequence[float], d: float = 1.0) -> Motor3:
    """Motor moving every point by d times the given vector under :func:`apply`."""
    v = np.asarray(direction_vector, dtype=float) * d
    return Motor3(1.0 + 0.5 * bivector_from_coords([v[0], v[1], v[2], 0.0, 0.0, 0.0]))


def ideal_translator(v: Point3, d: float) -> Motor3:
    """1 + d (E0 v V) I; the plain sandwich T X ~T moves by 2d along the unit direction V."""
    if not v.is_ideal():
        raise PreconditionError("ideal_translator needs an ideal point")
    if abs(v.ideal_norm() - 1.0) > Config.NORMALIZATION_TOLERANCE:
        raise NotNormalizedError("direction must have unit ideal norm")
    return Motor3(1.0 + d * ((E0 & v.mv) * I))


def motor_from_screw(axis: Line3, angle: float, pitch: float) -> Motor3:
    """Screw turning by angle about the axis while advancing pitch * angle along it."""
    _require_line(axis, "axis")
    generator = axis.mv + pitch * polar(axis).mv
    return exp_bivector((angle / 2.0) * generator)


def screw_path(axis: Line3, angle: float, pitch: float, start: Point3, samples: int) -> List[Point3]:
    """Positions of ``start`` along the screw motion at evenly spaced parameters in [0, 1]."""
    if samples < 2:
        raise PreconditionError("screw_path needs at least two samples")
    path = []
    for t in np.linspace(0.0, 1.0, samples):
        path.append(apply(motor_from_screw(axis, t * angle, pitch), start))
    return path


# line pairs


def product_of_lines(omega: Line3, sigma: Line3) -> LinePairProduct:
    _require_line(omega, "omega")
    _require_line(sigma, "sigma")
    product = omega.mv * sigma.mv
    grade0 = product.scalar
    grade4 = product.pseudoscalar_weight
    grade2 = product.grade_part(2)
    if grade2.is_zero(Config.GEOMETRY_TOLERANCE):
        raise DependentArgumentsError("Identical lines have no common normal")
    cos_alpha = -grade0
    sin_alpha = float(np.linalg.norm(bivector_coords(grade2)[3:]))
    alpha = math.atan2(sin_alpha, cos_alpha)
    if sin_alpha <= Config.GEOMETRY_TOLERANCE:
        return LinePairProduct(
            grade0=grade0,
            grade2=grade2,
            grade4=grade4,
            cos_alpha=cos_alpha,
            d_sin_alpha=-grade4,
            alpha=alpha,
            d=grade2.ideal_norm(),
            common_normal=None,
        )
    d = -grade4 / sin_alpha
    normal = -grade2 / sin_alpha - (d * cos_alpha / sin_alpha ** 2) * (I * grade2)
    return LinePairProduct(
        grade0=grade0,
        grade2=grade2,
        grade4=grade4,
        cos_alpha=cos_alpha,
        d_sin_alpha=-grade4,
        alpha=alpha,
        d=d,
        common_normal=Line3(normal),
    )


def common_normal(omega: Line3, sigma: Line3) -> Line3:
    result = product_of_lines(omega, sigma)
    if result.common_normal is None:
        raise DegeneratePencilError("Parallel lines have a pencil of common normals")
    return result.common_normal


def compose_turns(omega: Line3, sigma: Line3) -> Motor3:
    """Half-turn about omega followed by half-turn about sigma.

    Equals the screw about the common normal turning by 2 alpha and advancing 2 d.
    """
    _require_line(omega, "omega")
    _require_line(sigma, "sigma")
    return Motor3(omega.mv * sigma.mv)


# kaleidoscope


def dihedral_mirrors(k: int) -> Tuple[Plane, Plane]:
    """Two planes through the z-axis meeting at angle pi/k."""
    if k < 2:
        raise PreconditionError(f"k must be at least 2, got {k}")
    theta = math.pi / k
    return plane(1.0, 0.0, 0.0, 0.0), plane(math.cos(theta), math.sin(theta), 0.0, 0.0)


def closure_error(a: Plane, b: Plane, k: int) -> float:
    """Distance of (ab)^k from the identity isometry; -1 and 1 act identically."""
    power = (a.mv * b.mv) ** k
    one = PGA3D.scalar(1.0)
    return min(power.max_abs_diff(one), power.max_abs_diff(-one))


def _orbit_key(mv: Multivector) -> Tuple[float, ...]:
    coeffs = mv.coeffs
    nonzero = np.flatnonzero(np.abs(coeffs) > 1e-9)
    if nonzero.size and coeffs[nonzero[0]] < 0:
        coeffs = -coeffs
    return tuple(np.round(coeffs, 8) + 0.0)


def kaleidoscope_orbit(a: Plane, b: Plane, x: Element, k: Optional[int] = None, max_size: int = 1000) -> KaleidoscopeOrbit:
    """All alternating products of two mirrors, modulo sign, and their images of x."""
    _require_plane(a, "a")
    _require_plane(b, "b")
    identity = PGA3D.scalar(1.0)
    versors = [identity]
    seen = {_orbit_key(identity)}
    frontier = [identity]
    while frontier and len(versors) < max_size:
        next_frontier = []
        for g in frontier:
            for mirror in (a.mv, b.mv):
                h = g * mirror
                key = _orbit_key(h)
                if key not in seen:
                    seen.add(key)
                    versors.append(h)
                    next_frontier.append(h)
        frontier = next_frontier
    if frontier:
        logger.warning(f"Kaleidoscope orbit did not close within {max_size} elements")
    images = [type(x)(sandwich(g, x.mv)) for g in versors]
    error = closure_error(a, b, k) if k is not None else math.nan
    return KaleidoscopeOrbit(versors=versors, images=images, closure_error=error, k=k)


# dual quaternions: i = -e23, j = -e31, k = -e12, eps = I


def to_dual_quaternion(m: Motor3) -> Tuple[float, ...]:
    c = even_coords(m.mv)
    s, w01, w02, w03, w23, w31, w12, p = c
    return (float(s), float(-w23), float(-w31), float(-w12), float(p), float(w01), float(w02), float(w03))


def from_dual_quaternion(q: Sequence[float]) -> Motor3:
    if len(q) != 8:
        raise PreconditionError(f"A dual quaternion has 8 components, got {len(q)}")
    s, qi, qj, qk, p, ti, tj, tk = (float(v) for v in q)
    return Motor3(even_from_coords([s, ti, tj, tk, -qi, -qj, -qk, p]))


def _quat_mul(a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def dq_mul(a: Sequence[float], b: Sequence[float]) -> Tuple[float, ...]:
    """Dual-quaternion product (r1 + eps d1)(r2 + eps d2) = r1 r2 + eps (r1 d2 + d1 r2)."""
    r1, d1 = np.asarray(a[:4], dtype=float), np.asarray(a[4:], dtype=float)
    r2, d2 = np.asarray(b[:4], dtype=float), np.asarray(b[4:], dtype=float)
    real = _quat_mul(r1, r2)
    dual = _quat_mul(r1, d2) + _quat_mul(d1, r2)
    return tuple(float(v) for v in np.concatenate([real, dual]))
