import math

import pytest
from hypothesis import given

from src import pga2d
from src.algebra import PGA2D, exp_series
from src.errors import (
    DependentArgumentsError,
    IdealElementError,
    NotNormalizedError,
    PreconditionError,
)
from tests.conftest import angle, assert_close, coordinate, lines2, mv_close, points2, small


def test_label_constants():
    assert pga2d.E0.isclose(PGA2D.blade("e12"))
    assert pga2d.E1.isclose(-PGA2D.blade("e02"))
    assert pga2d.E2.isclose(PGA2D.blade("e01"))
    for name, (label, sign) in pga2d.LABELS.items():
        assert label in pga2d.LABEL_ORDER
        assert sign in (1.0, -1.0)


def test_constructor_preconditions():
    with pytest.raises(PreconditionError):
        pga2d.line(0.0, 0.0, 0.0)
    with pytest.raises(PreconditionError):
        pga2d.direction(0.0, 0.0)


def test_meet_of_axes_is_origin():
    origin = pga2d.meet(pga2d.line(1.0, 0.0, 0.0), pga2d.line(0.0, 1.0, 0.0))
    assert origin.weight == pytest.approx(1.0)
    assert_close(origin.coordinates(), [0.0, 0.0])


def test_meet_of_parallel_lines_is_ideal():
    p = pga2d.meet(pga2d.line(1.0, 0.0, 0.0), pga2d.line(1.0, 0.0, -1.0))
    assert p.is_ideal()
    assert_close(p.coordinates(), [0.0, 1.0])


def test_meet_of_identical_lines_is_zero():
    a = pga2d.line(0.6, 0.8, 1.0)
    p = pga2d.meet(a, a)
    assert p.is_zero()
    with pytest.raises(DependentArgumentsError):
        pga2d.require_nonzero(p, "meet")


def test_join_of_coincident_points_is_zero():
    p = pga2d.point(1.0, 2.0)
    assert pga2d.join(p, p).is_zero()


def test_join_of_two_points_on_x_axis():
    a = pga2d.normalize(pga2d.join(pga2d.point(0.0, 0.0), pga2d.point(1.0, 0.0)))
    assert a.a == pytest.approx(0.0, abs=1e-15)
    assert a.c == pytest.approx(0.0, abs=1e-15)
    assert abs(a.b) == pytest.approx(1.0)


def test_normalize():
    p = pga2d.normalize(pga2d.Point2(3.0 * pga2d.point(1.0, 2.0).mv))
    assert p.weight == pytest.approx(1.0)
    assert_close(p.coordinates(), [1.0, 2.0])
    a = pga2d.normalize(pga2d.line(3.0, 4.0, 5.0))
    assert_close([a.a, a.b, a.c], [0.6, 0.8, 1.0])
    with pytest.raises(DependentArgumentsError):
        pga2d.normalize(pga2d.Point2(PGA2D.zero()))


def test_ideal_elements_normalize_by_ideal_norm():
    v = pga2d.normalize(pga2d.direction(3.0, 4.0))
    assert v.ideal_norm() == pytest.approx(1.0)
    assert_close(v.coordinates(), [0.6, 0.8])


def test_signed_distance_point_line():
    assert pga2d.dist_point_line(pga2d.point(2.0, 5.0), pga2d.line(1.0, 0.0, -1.0)) == pytest.approx(1.0)
    assert pga2d.dist_point_line(pga2d.point(0.0, 5.0), pga2d.line(1.0, 0.0, -1.0)) == pytest.approx(-1.0)


def test_angle_requires_euclidean_normalized_lines():
    with pytest.raises(IdealElementError):
        pga2d.angle(pga2d.line(0.0, 0.0, 1.0), pga2d.line(1.0, 0.0, 0.0))
    with pytest.raises(NotNormalizedError):
        pga2d.angle(pga2d.line(2.0, 0.0, 0.0), pga2d.line(0.0, 1.0, 0.0))


def test_dist_parallel_lines_requires_parallel():
    with pytest.raises(PreconditionError):
        pga2d.dist_parallel_lines(pga2d.line(1.0, 0.0, 0.0), pga2d.line(0.0, 1.0, 0.0))
    assert pga2d.dist_parallel_lines(pga2d.line(1.0, 0.0, 0.0), pga2d.line(1.0, 0.0, -3.0)) == pytest.approx(3.0)


def test_perp_direction_join():
    v = pga2d.perp_direction_join(pga2d.point(0.0, 0.0), pga2d.point(2.0, 0.0))
    assert v.is_ideal()
    x, y = v.coordinates()
    assert x == pytest.approx(0.0, abs=1e-15)
    assert v.ideal_norm() == pytest.approx(2.0)


def test_nearest_point_and_perpendicular():
    x_axis = pga2d.line(0.0, 1.0, 0.0)
    p = pga2d.point(3.0, 4.0)
    assert_close(pga2d.nearest_point(p, x_axis).coordinates(), [3.0, 0.0])
    perp = pga2d.normalize(pga2d.perp_through(p, x_axis))
    assert abs(perp.a) == pytest.approx(1.0)
    assert pga2d.dist_point_line(p, perp) == pytest.approx(0.0, abs=1e-12)
    parallel = pga2d.normalize(pga2d.parallel_through(p, x_axis))
    assert abs(parallel.b) == pytest.approx(1.0)
    assert pga2d.dist_point_line(p, parallel) == pytest.approx(0.0, abs=1e-12)


def test_triangle_area():
    area = pga2d.triangle_area(pga2d.point(0.0, 0.0), pga2d.point(1.0, 0.0), pga2d.point(0.0, 1.0))
    assert area == pytest.approx(0.5)


def test_reflection_negates_point_weight():
    image = pga2d.reflect(pga2d.line(1.0, 0.0, 0.0), pga2d.point(1.0, 2.0))
    assert image.weight == pytest.approx(-1.0)
    assert_close(image.coordinates(), [-1.0, 2.0])


def test_quarter_turn_is_counter_clockwise():
    m = pga2d.rotor(pga2d.point(0.0, 0.0), math.pi / 2)
    assert_close(pga2d.apply(m, pga2d.point(1.0, 0.0)).coordinates(), [0.0, 1.0])
    assert m.angle() == pytest.approx(math.pi / 2)
    assert m.is_normalized()


def test_translators():
    assert_close(pga2d.apply(pga2d.translation(2.0, -1.0), pga2d.point(1.0, 2.0)).coordinates(), [3.0, 1.0])
    t = pga2d.translator(pga2d.direction(1.0, 0.0), 1.5)
    assert_close(pga2d.apply(t, pga2d.point(0.0, 0.0)).coordinates(), [0.0, -1.5])
    with pytest.raises(PreconditionError):
        pga2d.translator(pga2d.point(1.0, 1.0), 1.0)
    with pytest.raises(NotNormalizedError):
        pga2d.translator(pga2d.direction(2.0, 0.0), 1.0)


def test_motor_normalization():
    m = pga2d.Motor2(3.0 * pga2d.rotor(pga2d.point(1.0, 1.0), 0.3).mv)
    assert not m.is_normalized()
    assert m.normalized().is_normalized()
    with pytest.raises(NotNormalizedError):
        pga2d.Motor2(PGA2D.zero()).normalized()


@given(lines2(), lines2())
def test_meet_lies_on_both_lines(a, b):
    p = pga2d.meet(a, b)
    assert (a.mv ^ p.mv).is_zero(1e-12)
    assert (b.mv ^ p.mv).is_zero(1e-12)


@given(points2(), points2())
def test_distance_forms_agree(p, q):
    P, Q = pga2d.point(*p), pga2d.point(*q)
    expected = math.hypot(p[0] - q[0], p[1] - q[1])
    assert pga2d.dist_point_point(P, Q) == pytest.approx(expected, abs=1e-12)
    assert pga2d.dist_point_point_ideal(P, Q) == pytest.approx(expected, abs=1e-12)


@given(lines2(), lines2())
def test_angle_forms_agree(a, b):
    alpha = pga2d.angle(a, b)
    cos_cross_check = a.a * b.a + a.b * b.b
    assert math.cos(alpha) == pytest.approx(cos_cross_check, abs=1e-12)
    assert math.sin(pga2d.angle_wedge(a, b)) == pytest.approx(abs(math.sin(alpha)), abs=1e-9)


@given(lines2(), lines2())
def test_line_projection_decomposition(m, n):
    total = pga2d.project_line_onto_line(m, n).mv + pga2d.reject_line_from_line(m, n).mv
    assert total.max_abs_diff(m.mv) < 1e-12


@given(lines2(), points2())
def test_point_projection_decomposition(m, p):
    P = pga2d.point(*p)
    projection = pga2d.project_line_onto_point(m, P)
    total = projection.mv + pga2d.reject_line_from_point(m, P).mv
    assert total.max_abs_diff(m.mv) < 1e-12
    assert (projection.mv ^ P.mv).is_zero(1e-12)


@given(points2(), angle, points2(), points2())
def test_composition_order(center, alpha, shift, x):
    first = pga2d.rotor(pga2d.point(*center), alpha)
    second = pga2d.translation(*shift)
    X = pga2d.point(*x)
    step_by_step = pga2d.apply(second, pga2d.apply(first, X))
    composed = pga2d.apply(pga2d.compose(first, second), X)
    assert_close(step_by_step.coordinates(), composed.coordinates(), 1e-10)


@given(lines2(), lines2(), points2())
def test_motor_from_lines_is_two_reflections(a, b, x):
    X = pga2d.point(*x)
    twice = pga2d.reflect(b, pga2d.reflect(a, X))
    assert_close(pga2d.apply(pga2d.motor_from_lines(a, b), X).coordinates(), twice.coordinates(), 1e-10)


@given(coordinate, coordinate, angle)
def test_rotation_preserves_distance_to_center(x, y, alpha):
    center = pga2d.point(0.5, -0.25)
    X = pga2d.point(x, y)
    image = pga2d.apply(pga2d.rotor(center, alpha), X)
    assert pga2d.dist_point_point(center, pga2d.normalize(image)) == pytest.approx(
        pga2d.dist_point_point(center, X), abs=1e-10
    )


@given(points2(), angle)
def test_rotor_matches_exponential_series(c, alpha):
    center = pga2d.point(*c)
    assert mv_close(pga2d.rotor(center, alpha).mv, exp_series((alpha / 2.0) * center.mv), 1e-12)


@given(points2(), points2())
def test_point_pair_product(p, q):
    product = pga2d.point(*p).mv * pga2d.point(*q).mv
    assert product.scalar == pytest.approx(-1.0, abs=1e-12)
    assert product.grade_part(2).ideal_norm() == pytest.approx(math.dist(p, q), abs=1e-10)


@given(points2(), small, small)
def test_ideal_norm_is_norm_of_join_with_point(p, vx, vy):
    v = pga2d.Point2(vx * pga2d.E1 + vy * pga2d.E2)
    through = pga2d.Line2(v.mv & pga2d.point(*p).mv)
    assert pga2d.ideal_norm(v) == pytest.approx(through.norm(), abs=1e-12)
    assert pga2d.ideal_norm(v) == pytest.approx(math.hypot(vx, vy), abs=1e-12)


@given(points2(), angle, points2(), lines2(), lines2(), points2())
def test_motors_preserve_distances_and_angles(c, alpha, shift, a, b, x):
    m = pga2d.compose(pga2d.rotor(pga2d.point(*c), alpha), pga2d.translation(*shift))
    X = pga2d.point(*x)
    moved_a, moved_b, moved_x = (pga2d.apply(m, e) for e in (a, b, X))
    assert pga2d.dist_point_line(moved_x, moved_a) == pytest.approx(pga2d.dist_point_line(X, a), abs=1e-9)
    assert math.cos(pga2d.angle(moved_a, moved_b)) == pytest.approx(math.cos(pga2d.angle(a, b)), abs=1e-9)
