"""Randomized oracle suites for the plane and space construction tables.

Every row pairs a geometric-algebra construction with an independent
numpy computation of the same quantity on random normalized inputs. Each row
draws from its own generator spawned off one ``SeedSequence`` so a report is
fully determined by the seed and the trial count.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from src import pga2d, pga3d
from src.algebra import PGA2D, PGA3D, exp_series, sandwich
from src.config import Config
from src.errors import PreconditionError

logger = logging.getLogger(__name__)

RowCheck = Callable[[np.random.Generator], float]


@dataclass(frozen=True)
class FormulaRow:
    name: str
    formula: str
    check: RowCheck
    # overrides the checker tolerance for rows with a tighter bound
    tolerance: Optional[float] = None


# random inputs


def _unit(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def _coords(rng: np.random.Generator, n: int, scale: float = 2.0) -> np.ndarray:
    return rng.uniform(-scale, scale, size=n)


def _separated(rng: np.random.Generator, n: int, min_distance: float = 0.5) -> Tuple[np.ndarray, np.ndarray]:
    while True:
        p, q = _coords(rng, n), _coords(rng, n)
        if np.linalg.norm(p - q) > min_distance:
            return p, q


def _rotation2(alpha: float) -> np.ndarray:
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, -s], [s, c]])


def _rodrigues(v: np.ndarray, u: np.ndarray, alpha: float) -> np.ndarray:
    """Right-handed rotation of v about the unit vector u."""
    return v * math.cos(alpha) + np.cross(u, v) * math.sin(alpha) + u * np.dot(u, v) * (1.0 - math.cos(alpha))


def _err(*values) -> float:
    return float(max(np.max(np.abs(np.asarray(v, dtype=float))) for v in values))


# plane


def _line2(theta: float, c: float) -> pga2d.Line2:
    return pga2d.line(math.cos(theta), math.sin(theta), c)


def _random_line2(rng) -> Tuple[pga2d.Line2, np.ndarray, float]:
    theta = rng.uniform(0.0, 2.0 * math.pi)
    c = rng.uniform(-2.0, 2.0)
    return _line2(theta, c), np.array([math.cos(theta), math.sin(theta)]), c


def _point2(xy: np.ndarray) -> pga2d.Point2:
    return pga2d.point(float(xy[0]), float(xy[1]))


def _on_line2(line: pga2d.Line2, xy: np.ndarray) -> float:
    scale = math.hypot(line.a, line.b)
    return (line.a * xy[0] + line.b * xy[1] + line.c) / scale


def _reflect2(xy: np.ndarray, n: np.ndarray, c: float) -> np.ndarray:
    return xy - 2.0 * (np.dot(n, xy) + c) * n


def _meet2(rng) -> float:
    t1 = rng.uniform(0.0, 2.0 * math.pi)
    t2 = t1 + rng.uniform(0.3, math.pi - 0.3)
    c = _coords(rng, 2)
    normals = np.array([[math.cos(t1), math.sin(t1)], [math.cos(t2), math.sin(t2)]])
    expected = np.linalg.solve(normals, -c)
    result = pga2d.meet(_line2(t1, c[0]), _line2(t2, c[1]))
    return _err(np.array(result.coordinates()) - expected)


def _join2(rng) -> float:
    p, q = _separated(rng, 2)
    result = pga2d.normalize(pga2d.join(_point2(p), _point2(q)))
    oracle = np.array([p[1] - q[1], q[0] - p[0], p[0] * q[1] - q[0] * p[1]])
    oracle /= np.linalg.norm(oracle[:2])
    got = np.array([result.a, result.b, result.c])
    up_to_sign = min(np.max(np.abs(got - oracle)), np.max(np.abs(got + oracle)))
    return _err(_on_line2(result, p), _on_line2(result, q), up_to_sign)


def _angle2(rng) -> float:
    t1, t2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
    a, b = _line2(t1, rng.uniform(-2, 2)), _line2(t2, rng.uniform(-2, 2))
    return _err(math.cos(pga2d.angle(a, b)) - math.cos(t1 - t2))


def _angle_cos_cross_check(rng) -> float:
    a, _, _ = _random_line2(rng)
    b, _, _ = _random_line2(rng)
    return _err(math.cos(pga2d.angle(a, b)) - (a.a * b.a + a.b * b.b))


def _angle_wedge2(rng) -> float:
    t1, t2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
    a, b = _line2(t1, rng.uniform(-2, 2)), _line2(t2, rng.uniform(-2, 2))
    return _err(math.sin(pga2d.angle_wedge(a, b)) - abs(math.sin(t1 - t2)))


def _dist_point_point2(rng) -> float:
    p, q = _coords(rng, 2), _coords(rng, 2)
    return _err(pga2d.dist_point_point(_point2(p), _point2(q)) - np.linalg.norm(p - q))


def _dist_point_point_ideal2(rng) -> float:
    p, q = _coords(rng, 2), _coords(rng, 2)
    return _err(pga2d.dist_point_point_ideal(_point2(p), _point2(q)) - np.linalg.norm(p - q))


def _perp_direction_join2(rng) -> float:
    p, q = _separated(rng, 2)
    result = pga2d.perp_direction_join(_point2(p), _point2(q))
    dx, dy = result.coordinates()
    d = q - p
    return _err(result.weight, dx * d[0] + dy * d[1], result.ideal_norm() - np.linalg.norm(d))


def _dist_point_line2(rng) -> float:
    a, n, c = _random_line2(rng)
    p = _coords(rng, 2)
    return _err(pga2d.dist_point_line(_point2(p), a) - (np.dot(n, p) + c))


def _dist_parallel_lines2(rng) -> float:
    theta = rng.uniform(0.0, 2.0 * math.pi)
    c1, c2 = _coords(rng, 2)
    return _err(pga2d.dist_parallel_lines(_line2(theta, c1), _line2(theta, c2)) - abs(c1 - c2))


def _angle_ideal_point_line2(rng) -> float:
    a, n, _ = _random_line2(rng)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    v = pga2d.direction(math.cos(phi), math.sin(phi))
    expected = abs(n[0] * math.cos(phi) + n[1] * math.sin(phi))
    return _err(math.sin(pga2d.angle_ideal_point_line(a, v)) - expected)


def _perp_through2(rng) -> float:
    a, n, _ = _random_line2(rng)
    p = _coords(rng, 2)
    result = pga2d.normalize(pga2d.perp_through(_point2(p), a))
    return _err(_on_line2(result, p), result.a * n[0] + result.b * n[1])


def _nearest_point2(rng) -> float:
    a, n, c = _random_line2(rng)
    p = _coords(rng, 2)
    expected = p - (np.dot(n, p) + c) * n
    return _err(np.array(pga2d.nearest_point(_point2(p), a).coordinates()) - expected)


def _parallel_through2(rng) -> float:
    a, n, _ = _random_line2(rng)
    p = _coords(rng, 2)
    result = pga2d.normalize(pga2d.parallel_through(_point2(p), a))
    return _err(_on_line2(result, p), result.a * n[1] - result.b * n[0])


def _triangle_area2(rng) -> float:
    a, b, c = _coords(rng, 2), _coords(rng, 2), _coords(rng, 2)
    u, v = b - a, c - a
    expected = 0.5 * abs(u[0] * v[1] - u[1] * v[0])
    return _err(pga2d.triangle_area(_point2(a), _point2(b), _point2(c)) - expected)


def _project_reject_line2(rng) -> float:
    m, _, _ = _random_line2(rng)
    n, _, _ = _random_line2(rng)
    total = pga2d.project_line_onto_line(m, n).mv + pga2d.reject_line_from_line(m, n).mv
    return total.max_abs_diff(m.mv)


def _project_reject_point2(rng) -> float:
    m, normal, _ = _random_line2(rng)
    p = _coords(rng, 2)
    projection = pga2d.project_line_onto_point(m, _point2(p))
    total = projection.mv + pga2d.reject_line_from_point(m, _point2(p)).mv
    parallel = (projection.a * normal[1] - projection.b * normal[0]) / math.hypot(projection.a, projection.b)
    return _err(total.max_abs_diff(m.mv), _on_line2(projection, p), parallel)


def _reflect2_row(rng) -> float:
    a, n, c = _random_line2(rng)
    p = _coords(rng, 2)
    return _err(np.array(pga2d.reflect(a, _point2(p)).coordinates()) - _reflect2(p, n, c))


def _rotor_apply2(rng) -> float:
    center, q = _coords(rng, 2), _coords(rng, 2)
    alpha = rng.uniform(-math.pi, math.pi)
    result = pga2d.apply(pga2d.rotor(_point2(center), alpha), _point2(q))
    expected = _rotation2(alpha) @ (q - center) + center
    return _err(np.array(result.coordinates()) - expected)


def _rotor_sandwich2(rng) -> float:
    center, q = _coords(rng, 2), _coords(rng, 2)
    alpha = rng.uniform(-math.pi, math.pi)
    result = pga2d.Point2(sandwich(pga2d.rotor(_point2(center), alpha).mv, _point2(q).mv))
    expected = _rotation2(-alpha) @ (q - center) + center
    return _err(np.array(result.coordinates()) - expected)


def _translator_apply2(rng) -> float:
    phi = rng.uniform(0.0, 2.0 * math.pi)
    d = rng.uniform(-2.0, 2.0)
    p = _coords(rng, 2)
    motor = pga2d.translator(pga2d.direction(math.cos(phi), math.sin(phi)), d)
    expected = p + d * np.array([math.sin(phi), -math.cos(phi)])
    return _err(np.array(pga2d.apply(motor, _point2(p)).coordinates()) - expected)


def _translator_sandwich2(rng) -> float:
    phi = rng.uniform(0.0, 2.0 * math.pi)
    d = rng.uniform(-2.0, 2.0)
    p = _coords(rng, 2)
    motor = pga2d.translator(pga2d.direction(math.cos(phi), math.sin(phi)), d)
    result = pga2d.Point2(sandwich(motor.mv, _point2(p).mv))
    expected = p + d * np.array([-math.sin(phi), math.cos(phi)])
    return _err(np.array(result.coordinates()) - expected)


def _translation2(rng) -> float:
    p, shift = _coords(rng, 2), _coords(rng, 2)
    result = pga2d.apply(pga2d.translation(shift[0], shift[1]), _point2(p))
    return _err(np.array(result.coordinates()) - (p + shift))


def _motor_from_lines2(rng) -> float:
    a, na, ca = _random_line2(rng)
    b, nb, cb = _random_line2(rng)
    p = _coords(rng, 2)
    result = pga2d.apply(pga2d.motor_from_lines(a, b), _point2(p))
    expected = _reflect2(_reflect2(p, na, ca), nb, cb)
    return _err(np.array(result.coordinates()) - expected)


def _compose2(rng) -> float:
    center, p, shift = _coords(rng, 2), _coords(rng, 2), _coords(rng, 2)
    alpha = rng.uniform(-math.pi, math.pi)
    first = pga2d.rotor(_point2(center), alpha)
    second = pga2d.translation(shift[0], shift[1])
    result = pga2d.apply(pga2d.compose(first, second), _point2(p))
    expected = _rotation2(alpha) @ (p - center) + center + shift
    return _err(np.array(result.coordinates()) - expected)


ROWS_2D: List[FormulaRow] = [
    FormulaRow("meet", "a ^ b", _meet2),
    FormulaRow("join", "P v Q", _join2),
    FormulaRow("angle", "cos(alpha) = a . b", _angle2),
    FormulaRow("angle_cos_cross_check", "a . b = a0 a1 + b0 b1", _angle_cos_cross_check),
    FormulaRow("angle_wedge", "sin(alpha) = |a ^ b|", _angle_wedge2),
    FormulaRow("dist_point_point", "|P v Q|", _dist_point_point2),
    FormulaRow("dist_point_point_ideal", "|P x Q|_inf", _dist_point_point_ideal2),
    FormulaRow("perp_direction_join", "P x Q", _perp_direction_join2),
    FormulaRow("dist_point_line", "a ^ P", _dist_point_line2),
    FormulaRow("dist_parallel_lines", "|a ^ b|_inf", _dist_parallel_lines2),
    FormulaRow("angle_ideal_point_line", "sin(alpha) = |a ^ V|_inf", _angle_ideal_point_line2),
    FormulaRow("perp_through", "P . a", _perp_through2),
    FormulaRow("nearest_point", "(P . a) a", _nearest_point2),
    FormulaRow("parallel_through", "(P . a) P", _parallel_through2),
    FormulaRow("triangle_area", "|A v B v C| / 2", _triangle_area2),
    FormulaRow("project_reject_line", "(m . n) n + (m ^ n) n = m", _project_reject_line2),
    FormulaRow("project_reject_point", "-(m . P) P - (m ^ P) P = m", _project_reject_point2),
    FormulaRow("reflect", "a X a", _reflect2_row),
    FormulaRow("rotor_apply", "~R X R, R = cos(alpha/2) + sin(alpha/2) P", _rotor_apply2),
    FormulaRow("rotor_sandwich", "R X ~R", _rotor_sandwich2),
    FormulaRow("translator_apply", "~T X T, T = 1 + (d/2) V", _translator_apply2),
    FormulaRow("translator_sandwich", "T X ~T", _translator_sandwich2),
    FormulaRow("translation", "1 + (-dy E1 + dx E2) / 2", _translation2),
    FormulaRow("motor_from_lines", "ab", _motor_from_lines2),
    FormulaRow("compose", "m1 m2", _compose2),
]


# space


def _point3(xyz: np.ndarray) -> pga3d.Point3:
    return pga3d.point3(float(xyz[0]), float(xyz[1]), float(xyz[2]))


def _random_plane(rng) -> Tuple[pga3d.Plane, np.ndarray, float]:
    n = _unit(rng, 3)
    d = rng.uniform(-2.0, 2.0)
    return pga3d.plane(n[0], n[1], n[2], d), n, d


def _random_line3(rng) -> Tuple[pga3d.Line3, np.ndarray, np.ndarray]:
    p, u = _coords(rng, 3), _unit(rng, 3)
    return pga3d.line_from_point_direction(p, u), p, u


def _on_plane(a: pga3d.Plane, xyz: np.ndarray) -> float:
    return (np.dot(a.normal, xyz) + a.offset) / np.linalg.norm(a.normal)


def _off_line(line: pga3d.Line3, xyz: np.ndarray) -> float:
    unit = pga3d.normalize(line)
    return float(np.max(np.abs((_point3(xyz).mv & unit.mv).coeffs)))


def _unit_direction(line: pga3d.Line3) -> np.ndarray:
    d = line.direction
    return d / np.linalg.norm(d)


def _parallel(u: np.ndarray, v: np.ndarray) -> float:
    return float(np.linalg.norm(np.cross(u / np.linalg.norm(u), v / np.linalg.norm(v))))


def _foot_on_line(p: np.ndarray, p0: np.ndarray, u: np.ndarray) -> np.ndarray:
    return p0 + np.dot(p - p0, u) * u


def _angle_planes(rng) -> float:
    a, n1, _ = _random_plane(rng)
    b, n2, _ = _random_plane(rng)
    return _err(math.cos(pga3d.angle_planes(a, b)) - np.dot(n1, n2))


def _angle_planes_wedge(rng) -> float:
    a, n1, _ = _random_plane(rng)
    b, n2, _ = _random_plane(rng)
    return _err(math.sin(pga3d.angle_planes_wedge(a, b)) - np.linalg.norm(np.cross(n1, n2)))


def _dist_parallel_planes(rng) -> float:
    n = _unit(rng, 3)
    d1, d2 = _coords(rng, 2)
    a, b = pga3d.plane(n[0], n[1], n[2], d1), pga3d.plane(n[0], n[1], n[2], d2)
    return _err(pga3d.dist_parallel_planes(a, b) - abs(d1 - d2))


def _line_meet(rng) -> float:
    while True:
        a, n1, d1 = _random_plane(rng)
        b, n2, d2 = _random_plane(rng)
        if np.linalg.norm(np.cross(n1, n2)) > 0.3:
            break
    result = pga3d.line_meet(a, b)
    # a point on both planes: least-norm solution of the two plane equations
    p0 = np.linalg.lstsq(np.array([n1, n2]), -np.array([d1, d2]), rcond=None)[0]
    return _err(_off_line(result, p0), _parallel(result.direction, np.cross(n1, n2)))


def _line_through(rng) -> float:
    p, q = _separated(rng, 3)
    result = pga3d.line_through(_point3(p), _point3(q))
    return _err(_off_line(result, p), _off_line(result, q), _parallel(result.direction, q - p))


def _meet3(rng) -> float:
    while True:
        planes = [_random_plane(rng) for _ in range(3)]
        normals = np.array([n for _, n, _ in planes])
        if abs(np.linalg.det(normals)) > 0.25:
            break
    expected = np.linalg.solve(normals, -np.array([d for _, _, d in planes]))
    result = pga3d.meet3(*(pl for pl, _, _ in planes))
    return _err(result.coordinates() - expected)


def _join3(rng) -> float:
    while True:
        p, q, r = _coords(rng, 3), _coords(rng, 3), _coords(rng, 3)
        if np.linalg.norm(np.cross(q - p, r - p)) > 0.5:
            break
    result = pga3d.join3(_point3(p), _point3(q), _point3(r))
    return _err(_on_plane(result, p), _on_plane(result, q), _on_plane(result, r))


def _dist_point_plane(rng) -> float:
    a, n, d = _random_plane(rng)
    p = _coords(rng, 3)
    return _err(pga3d.dist_point_plane(_point3(p), a) - (np.dot(n, p) + d))


def _angle_ideal_point_plane(rng) -> float:
    a, n, _ = _random_plane(rng)
    v = _unit(rng, 3)
    result = pga3d.angle_ideal_point_plane(a, pga3d.direction3(*v))
    return _err(math.sin(result) - abs(np.dot(n, v)))


def _perp_direction_join3(rng) -> float:
    p, q = _separated(rng, 3)
    result = pga3d.perp_direction_join(_point3(p), _point3(q))
    return _err(
        np.linalg.norm(result.direction),
        _parallel(result.moment, q - p),
        result.ideal_norm() - np.linalg.norm(q - p),
    )


def _dist_point_point3(rng) -> float:
    p, q = _coords(rng, 3), _coords(rng, 3)
    return _err(pga3d.dist_point_point(_point3(p), _point3(q)) - np.linalg.norm(p - q))


def _dist_point_point_ideal3(rng) -> float:
    p, q = _coords(rng, 3), _coords(rng, 3)
    return _err(pga3d.dist_point_point_ideal(_point3(p), _point3(q)) - np.linalg.norm(p - q))


def _perp_line_point_plane(rng) -> float:
    a, n, _ = _random_plane(rng)
    p = _coords(rng, 3)
    result = pga3d.perp_line_point_plane(_point3(p), a)
    return _err(_off_line(result, p), _parallel(result.direction, n))


def _nearest_point_on_plane(rng) -> float:
    a, n, d = _random_plane(rng)
    p = _coords(rng, 3)
    expected = p - (np.dot(n, p) + d) * n
    return _err(pga3d.nearest_point_on_plane(_point3(p), a).coordinates() - expected)


def _parallel_plane_through_point(rng) -> float:
    a, n, _ = _random_plane(rng)
    p = _coords(rng, 3)
    result = pga3d.parallel_plane_through_point(_point3(p), a)
    return _err(_on_plane(result, p), _parallel(result.normal, n))


def _perp_plane_line_plane(rng) -> float:
    line, p0, u = _random_line3(rng)
    while True:
        a, n, _ = _random_plane(rng)
        if abs(np.dot(u, n)) < 0.9:
            break
    result = pga3d.perp_plane_line_plane(line, a)
    normal = result.normal / np.linalg.norm(result.normal)
    return _err(_on_plane(result, p0), _on_plane(result, p0 + u), np.dot(normal, n))


def _meet_line_plane(rng) -> float:
    line, p0, u = _random_line3(rng)
    while True:
        a, n, d = _random_plane(rng)
        if abs(np.dot(u, n)) > 0.3:
            break
    t = -(np.dot(n, p0) + d) / np.dot(n, u)
    return _err(pga3d.meet_line_plane(line, a).coordinates() - (p0 + t * u))


def _line_and_distant_point(rng, min_distance: float = 0.3):
    line, p0, u = _random_line3(rng)
    while True:
        p = _coords(rng, 3)
        if np.linalg.norm(p - _foot_on_line(p, p0, u)) > min_distance:
            return line, p0, u, p


def _join_point_line(rng) -> float:
    line, p0, u, p = _line_and_distant_point(rng)
    result = pga3d.join_point_line(_point3(p), line)
    return _err(_on_plane(result, p), _on_plane(result, p0), _on_plane(result, p0 + u))


def _perp_plane_point_line(rng) -> float:
    line, _, u = _random_line3(rng)
    p = _coords(rng, 3)
    result = pga3d.perp_plane_point_line(_point3(p), line)
    return _err(_on_plane(result, p), _parallel(result.normal, u))


def _nearest_point_on_line(rng) -> float:
    line, p0, u = _random_line3(rng)
    p = _coords(rng, 3)
    return _err(pga3d.nearest_point_on_line(_point3(p), line).coordinates() - _foot_on_line(p, p0, u))


def _parallel_line_through_point(rng) -> float:
    line, _, u = _random_line3(rng)
    p = _coords(rng, 3)
    result = pga3d.parallel_line_through_point(_point3(p), line)
    return _err(_off_line(result, p), _parallel(result.direction, u))


def _perp_line_through_point(rng) -> float:
    line, p0, u, p = _line_and_distant_point(rng)
    result = pga3d.perp_line_through_point(_point3(p), line)
    foot = _foot_on_line(p, p0, u)
    return _err(_off_line(result, p), _off_line(result, foot), np.dot(_unit_direction(result), u))


def _normal_line_through(rng) -> float:
    a, n, d = _random_plane(rng)
    p = _coords(rng, 3)
    result = pga3d.normal_line_through(_point3(p), a)
    foot = p - (np.dot(n, p) + d) * n
    return _err(_off_line(result, p), _off_line(result, foot), _parallel(result.direction, n))


def _tetra_volume(rng) -> float:
    a, b, c, d = (_coords(rng, 3) for _ in range(4))
    expected = abs(np.linalg.det(np.array([b - a, c - a, d - a]))) / 6.0
    return _err(pga3d.tetra_volume(_point3(a), _point3(b), _point3(c), _point3(d)) - expected)


def _reflect3(rng) -> float:
    a, n, d = _random_plane(rng)
    p = _coords(rng, 3)
    expected = p - 2.0 * (np.dot(n, p) + d) * n
    return _err(pga3d.reflect3(a, _point3(p)).coordinates() - expected)


def _half_turn(rng) -> float:
    line, p0, u = _random_line3(rng)
    p = _coords(rng, 3)
    expected = 2.0 * _foot_on_line(p, p0, u) - p
    return _err(pga3d.half_turn(line, _point3(p)).coordinates() - expected)


def _rotor3_apply(rng) -> float:
    line, p0, u = _random_line3(rng)
    p = _coords(rng, 3)
    alpha = rng.uniform(-math.pi, math.pi)
    result = pga3d.apply(pga3d.rotor3(line, alpha), _point3(p))
    return _err(result.coordinates() - (p0 + _rodrigues(p - p0, u, alpha)))


def _rotor3_sandwich(rng) -> float:
    line, p0, u = _random_line3(rng)
    p = _coords(rng, 3)
    alpha = rng.uniform(-math.pi, math.pi)
    result = pga3d.Point3(sandwich(pga3d.rotor3(line, alpha).mv, _point3(p).mv))
    return _err(result.coordinates() - (p0 + _rodrigues(p - p0, u, -alpha)))


def _translator3(rng) -> float:
    v, p = _unit(rng, 3), _coords(rng, 3)
    d = rng.uniform(-2.0, 2.0)
    result = pga3d.apply(pga3d.translator3(v, d), _point3(p))
    return _err(result.coordinates() - (p + d * v))


def _ideal_translator(rng) -> float:
    v, p = _unit(rng, 3), _coords(rng, 3)
    d = rng.uniform(-2.0, 2.0)
    motor = pga3d.ideal_translator(pga3d.direction3(*v), d)
    result = pga3d.Point3(sandwich(motor.mv, _point3(p).mv))
    return _err(result.coordinates() - (p + 2.0 * d * v))


def _motor_from_screw(rng) -> float:
    line, p0, u = _random_line3(rng)
    p = _coords(rng, 3)
    angle = rng.uniform(-math.pi, math.pi)
    pitch = rng.uniform(-1.0, 1.0)
    result = pga3d.apply(pga3d.motor_from_screw(line, angle, pitch), _point3(p))
    expected = p0 + _rodrigues(p - p0, u, angle) + pitch * angle * u
    return _err(result.coordinates() - expected)


def _exp_closed_form(rng) -> float:
    bivector = pga3d.bivector_from_coords(_coords(rng, 6, scale=1.0))
    return pga3d.exp_bivector(bivector).mv.max_abs_diff(exp_series(bivector))


def _log_exp(rng) -> float:
    coords = _coords(rng, 6, scale=1.0)
    rotation = np.linalg.norm(coords[3:])
    if rotation > 2.5:
        coords[3:] *= 2.5 / rotation
    bivector = pga3d.bivector_from_coords(coords)
    return pga3d.log_motor(pga3d.exp_bivector(bivector)).max_abs_diff(bivector)


def _skew_pair(rng):
    while True:
        omega, p1, u = _random_line3(rng)
        sigma, p2, v = _random_line3(rng)
        w = np.cross(u, v)
        if np.linalg.norm(w) > 0.2:
            return omega, p1, u, sigma, p2, v


def _product_of_lines(rng) -> float:
    omega, p1, u, sigma, p2, v = _skew_pair(rng)
    n = np.cross(u, v)
    sin_alpha = np.linalg.norm(n)
    n /= sin_alpha
    d = np.dot(p2 - p1, n)
    result = pga3d.product_of_lines(omega, sigma)
    normal = result.common_normal
    return _err(
        result.cos_alpha - np.dot(u, v),
        result.alpha - math.atan2(sin_alpha, np.dot(u, v)),
        result.d - d,
        result.d_sin_alpha - d * sin_alpha,
        normal.direction - n,
        (normal.mv * omega.mv).pseudoscalar_weight,
        (normal.mv * sigma.mv).pseudoscalar_weight,
    )


def _compose_turns(rng) -> float:
    omega, p1, u, sigma, p2, v = _skew_pair(rng)
    p = _coords(rng, 3)
    once = 2.0 * _foot_on_line(p, p1, u) - p
    expected = 2.0 * _foot_on_line(once, p2, v) - once
    result = pga3d.apply(pga3d.compose_turns(omega, sigma), _point3(p))
    return _err(result.coordinates() - expected)


def _random_motor(rng) -> pga3d.Motor3:
    line, _, _ = _random_line3(rng)
    return pga3d.motor_from_screw(line, rng.uniform(-math.pi, math.pi), rng.uniform(-1.0, 1.0))


def _dual_quaternion(rng) -> float:
    m1, m2 = _random_motor(rng), _random_motor(rng)
    product = pga3d.to_dual_quaternion(pga3d.compose(m1, m2))
    expected = pga3d.dq_mul(pga3d.to_dual_quaternion(m1), pga3d.to_dual_quaternion(m2))
    return _err(np.array(product) - np.array(expected))


ROWS_3D: List[FormulaRow] = [
    FormulaRow("angle_planes", "cos(alpha) = a . b", _angle_planes),
    FormulaRow("angle_planes_wedge", "sin(alpha) = |a ^ b|", _angle_planes_wedge),
    FormulaRow("dist_parallel_planes", "|a ^ b|_inf", _dist_parallel_planes),
    FormulaRow("line_meet", "a ^ b", _line_meet),
    FormulaRow("line_through", "P v Q", _line_through),
    FormulaRow("meet3", "a ^ b ^ c", _meet3),
    FormulaRow("join3", "P v Q v R", _join3),
    FormulaRow("dist_point_plane", "a ^ P", _dist_point_plane),
    FormulaRow("angle_ideal_point_plane", "sin(alpha) = |a ^ V|_inf", _angle_ideal_point_plane),
    FormulaRow("perp_direction_join", "P x Q", _perp_direction_join3),
    FormulaRow("dist_point_point", "|P v Q|", _dist_point_point3),
    FormulaRow("dist_point_point_ideal", "|P x Q|_inf", _dist_point_point_ideal3),
    FormulaRow("perp_line_point_plane", "P . a", _perp_line_point_plane),
    FormulaRow("nearest_point_on_plane", "(P . a) a", _nearest_point_on_plane),
    FormulaRow("parallel_plane_through_point", "(P . a) P", _parallel_plane_through_point),
    FormulaRow("perp_plane_line_plane", "Omega . a", _perp_plane_line_plane),
    FormulaRow("meet_line_plane", "Omega ^ a", _meet_line_plane),
    FormulaRow("join_point_line", "P v Omega", _join_point_line),
    FormulaRow("perp_plane_point_line", "P . Omega", _perp_plane_point_line),
    FormulaRow("nearest_point_on_line", "(P . Omega) Omega", _nearest_point_on_line),
    FormulaRow("parallel_line_through_point", "(P . Omega) P", _parallel_line_through_point),
    FormulaRow("perp_line_through_point", "((P . Omega) Omega) v P", _perp_line_through_point),
    FormulaRow("normal_line_through", "((a . P) ^ a) v P", _normal_line_through),
    FormulaRow("tetra_volume", "|A v B v C v D| / 6", _tetra_volume),
    FormulaRow("reflect", "a X a", _reflect3),
    FormulaRow("half_turn", "Omega X ~Omega", _half_turn),
    FormulaRow("rotor_apply", "~R X R, R = exp(alpha/2 Omega)", _rotor3_apply),
    FormulaRow("rotor_sandwich", "R X ~R", _rotor3_sandwich),
    FormulaRow("translator", "1 + (d/2)(v1 e01 + v2 e02 + v3 e03)", _translator3),
    FormulaRow("translator_ideal_point", "T X ~T, T = 1 + d (E0 v V) I", _ideal_translator),
    FormulaRow("motor_from_screw", "exp(angle/2 (Omega + pitch Omega_perp))", _motor_from_screw),
    FormulaRow("exp_closed_form", "exp(B) against its power series", _exp_closed_form, Config.SERIES_TOLERANCE),
    FormulaRow("log_exp", "log(exp(B)) = B", _log_exp),
    FormulaRow("product_of_lines", "Omega Sigma = -cos(alpha) + ... + d sin(alpha) I", _product_of_lines),
    FormulaRow("compose_turns", "Omega Sigma as two half-turns", _compose_turns),
    FormulaRow("dual_quaternion", "motor product as dual quaternion product", _dual_quaternion),
]

TABLES = {2: ROWS_2D, 3: ROWS_3D}


class FormulaChecker:
    def __init__(self, seed: Optional[int] = None, tolerance: Optional[float] = None):
        self.seed = Config.DEFAULT_SEED if seed is None else int(seed)
        self.tolerance = Config.GEOMETRY_TOLERANCE if tolerance is None else float(tolerance)

    def check_row(self, row: FormulaRow, rng: np.random.Generator, trials: int, dim: int) -> Dict:
        """Run one row on ``trials`` random configurations.

        Args:
            row: Construction and oracle
            rng: Generator owned by this row
            trials: Number of random configurations
            dim: 2 or 3, recorded in the result

        Returns:
            Dictionary with the row name, max error and pass flag; failing
            constructions record the exception under 'error'
        """
        try:
            max_error = 0.0
            for _ in range(trials):
                error = row.check(rng)
                if not math.isfinite(error):
                    raise PreconditionError(f"non-finite error {error!r}")
                max_error = max(max_error, error)
            result = {
                'table': f"{dim}d",
                'row': row.name,
                'formula': row.formula,
                'trials': trials,
                'max_error': max_error,
                'passed': max_error < (self.tolerance if row.tolerance is None else row.tolerance),
                'error': None,
            }
            if not result['passed']:
                logger.error(f"Row {dim}d.{row.name} failed with max error {max_error:.3e}")
            return result
        except Exception as e:
            logger.error(f"Error in row {dim}d.{row.name}: {str(e)}")
            return {
                'table': f"{dim}d",
                'row': row.name,
                'formula': row.formula,
                'trials': trials,
                'max_error': math.nan,
                'passed': False,
                'error': f"{type(e).__name__}: {e}",
            }

    def run(self, dim: int, trials: Optional[int] = None, progress: bool = False) -> pd.DataFrame:
        """Check every row of the plane (2) or space (3) table."""
        if dim not in TABLES:
            raise PreconditionError(f"dim must be 2 or 3, got {dim}")
        if trials is None:
            trials = Config.CHECK_TRIALS_2D if dim == 2 else Config.CHECK_TRIALS_3D
        if trials < 1:
            raise PreconditionError(f"trials must be >= 1, got {trials}")

        rows = TABLES[dim]
        children = np.random.SeedSequence(self.seed).spawn(len(rows))
        logger.info(f"Checking {len(rows)} {dim}d rows with {trials} trials each (seed {self.seed})")

        results = []
        for row, child in tqdm(list(zip(rows, children)), desc=f"Checking {dim}d rows", disable=not progress):
            results.append(self.check_row(row, np.random.default_rng(child), trials, dim))

        df = pd.DataFrame(results)
        failed = int((~df['passed']).sum())
        logger.info(f"{len(df) - failed}/{len(df)} {dim}d rows passed")
        return df

    def failed_rows(self, df: pd.DataFrame) -> List[str]:
        return [f"{t}.{r}" for t, r in df.loc[~df['passed'], ['table', 'row']].itertuples(index=False)]


# Cayley table


def _label_of(algebra, product) -> str:
    nonzero = np.flatnonzero(product.coeffs)
    if nonzero.size == 0:
        return "0"
    mask = int(nonzero[0])
    value = product.coeffs[mask]
    if algebra is PGA2D:
        label, sign = pga2d.LABELS[algebra.blade_names[mask]]
        value /= sign
    else:
        label = algebra.blade_names[mask]
    prefix = "-" if value < 0 else ""
    return f"{prefix}{label}"


def cayley_table(algebra: str = "2d") -> pd.DataFrame:
    """Basis-blade products as labels; rows are left factors.

    The plane algebra uses the labels 1, e0, e1, e2, E0, E1, E2, I; space uses
    canonical blade names in grade order.
    """
    if algebra == "2d":
        alg = PGA2D
        by_label = {label: (name, sign) for name, (label, sign) in pga2d.LABELS.items()}
        names = pga2d.LABEL_ORDER
        elements = [by_label[label][1] * alg.blade(by_label[label][0]) for label in names]
    elif algebra == "3d":
        alg = PGA3D
        names = [alg.blade_names[mask] for mask in alg.blade_order]
        elements = [alg.blade(name) for name in names]
    else:
        raise PreconditionError(f"algebra must be '2d' or '3d', got {algebra!r}")

    cells = [[_label_of(alg, x * y) for y in elements] for x in elements]
    return pd.DataFrame(cells, index=names, columns=names)


# kaleidoscope and screw reports


def kaleidoscope_report(k: int, mirror_k: Optional[int] = None, seed_point: Sequence[float] = (1.0, 0.3, 0.2)) -> Tuple[Dict, pd.DataFrame]:
    """Orbit of a point under two mirrors at angle pi/mirror_k, closure tested at power k."""
    mirror_k = k if mirror_k is None else mirror_k
    a, b = pga3d.dihedral_mirrors(mirror_k)
    orbit = pga3d.kaleidoscope_orbit(a, b, pga3d.point3(*seed_point), k=k)
    rows = []
    for index, (versor, image) in enumerate(zip(orbit.versors, orbit.images)):
        x, y, z = image.coordinates()
        rows.append({
            'index': index,
            'parity': 'even' if versor.grade_part(1).is_zero() and versor.grade_part(3).is_zero() else 'odd',
            'x': x,
            'y': y,
            'z': z,
        })
    closed = orbit.closure_error < Config.TOLERANCE and len(orbit) == 2 * k
    summary = {
        'k': k,
        'mirror_angle': math.pi / mirror_k,
        'orbit_size': len(orbit),
        'expected_size': 2 * k,
        'closure_error': orbit.closure_error,
        'closed': bool(closed),
    }
    logger.info(f"Kaleidoscope k={k}: {len(orbit)} elements, closure error {orbit.closure_error:.3e}")
    return summary, pd.DataFrame(rows)


def screw_report(axis: pga3d.Line3, angle: float, pitch: float, start: Sequence[float], samples: int) -> Tuple[Dict, pd.DataFrame]:
    """Sampled path of a point under a screw motion plus its advance along the axis."""
    axis = pga3d.normalize(axis)
    path = pga3d.screw_path(axis, angle, pitch, pga3d.point3(*start), samples)
    u = _unit_direction(axis)
    coords = np.array([p.coordinates() for p in path])
    df = pd.DataFrame(coords, columns=['x', 'y', 'z'])
    df.insert(0, 't', np.linspace(0.0, 1.0, samples))
    advance = float(np.dot(coords[-1] - coords[0], u))
    summary = {
        'angle': angle,
        'pitch': pitch,
        'samples': samples,
        'axis': [float(v) for v in axis.coords],
        'start': [float(v) for v in start],
        'axial_advance': advance,
        'expected_advance': angle * pitch,
        'advance_error': abs(advance - angle * pitch),
    }
    return summary, df
