import math

import numpy as np
import pytest
from hypothesis import given

from src.algebra import (
    PGA2D,
    PGA3D,
    AlgebraDescriptor,
    Multivector,
    algebra_for,
    commutator,
    cross,
    exp_series,
    geometric_product,
    inner_product,
    outer_product,
    poincare_dual,
    poincare_undual,
    regressive_product,
    reorder_sign,
    sandwich,
)
from src.errors import AlgebraMismatchError, GradeError, PGAError
from src.pga2d import Point2
from tests.conftest import multivectors, mv_close, small, unit_vectors


def test_descriptor_counts():
    d = AlgebraDescriptor(3, 0, 1)
    assert d.dim == 4
    assert d.blade_count == 16
    assert d.squares == (0, 1, 1, 1)
    assert d.label == "Cl(3,0,1)"


def test_descriptor_rejects_negative_counts():
    with pytest.raises(PGAError):
        AlgebraDescriptor(-1, 0, 1)


def test_algebra_for_is_cached():
    assert algebra_for(2, 0, 1) is PGA2D
    assert algebra_for(3, 0, 1) is PGA3D


def test_reorder_sign():
    # e1 e0 = -e0 e1
    assert reorder_sign(0b10, 0b01) == -1
    assert reorder_sign(0b01, 0b10) == 1
    # e12 e0 = e0 e12
    assert reorder_sign(0b110, 0b001) == 1


def test_blade_order_is_grade_then_index():
    names = [PGA2D.blade_names[mask] for mask in PGA2D.blade_order]
    assert names == ["1", "e0", "e1", "e2", "e01", "e02", "e12", "e012"]
    assert PGA3D.masks_of_grade(2) == [PGA3D.parse_blade(n)[0] for n in ("e01", "e02", "e03", "e12", "e13", "e23")]


def test_parse_permuted_blade_names():
    mask, sign = PGA3D.parse_blade("e31")
    assert mask == PGA3D.parse_blade("e13")[0]
    assert sign == -1.0
    assert PGA3D.parse_blade("e021") == (PGA3D.parse_blade("e012")[0], -1.0)
    assert PGA3D.parse_blade("I") == (PGA3D.pseudoscalar_mask, 1.0)


@pytest.mark.parametrize("name", ["e4", "e11", "x1", "e"])
def test_parse_rejects_bad_names(name):
    with pytest.raises(PGAError):
        PGA3D.parse_blade(name)


def test_basis_squares():
    assert (PGA3D.blade("e0") * PGA3D.blade("e0")).is_zero()
    for name in ("e1", "e2", "e3"):
        assert (PGA3D.blade(name) * PGA3D.blade(name)).isclose(1.0)
    assert (PGA3D.blade("e12") * PGA3D.blade("e12")).isclose(-1.0)
    assert (PGA3D.pseudoscalar() * PGA3D.pseudoscalar()).is_zero()


def test_signed_coefficient_access():
    mv = Multivector.from_pairs(PGA3D, [["e31", 2.0], ["1", 0.5]])
    assert mv["e13"] == -2.0
    assert mv["e31"] == 2.0
    assert mv.scalar == 0.5


def test_coefficients_are_read_only():
    mv = PGA2D.blade("e1")
    with pytest.raises(ValueError):
        mv.coeffs[0] = 1.0


def test_wrong_coefficient_count():
    with pytest.raises(PGAError):
        Multivector(PGA2D, [1.0, 2.0, 3.0])


def test_mixing_algebras_raises():
    with pytest.raises(AlgebraMismatchError):
        PGA2D.blade("e1") * PGA3D.blade("e1")
    with pytest.raises(AlgebraMismatchError):
        geometric_product(PGA2D.blade("e1"), PGA3D.blade("e1"))


def test_grade_part_out_of_range():
    with pytest.raises(GradeError):
        PGA2D.blade("e1").grade_part(4)


def test_grade_detection():
    mv = PGA3D.blade("e12") + 2.0 * PGA3D.blade("e03")
    assert mv.grade() == 2
    assert (mv + 1.0).grade() is None
    assert (mv + 1.0).grades_present() == [0, 2]


def test_powers():
    e12 = PGA2D.blade("e12")
    assert (e12 ** 2).isclose(-1.0)
    assert (e12 ** 0).isclose(1.0)
    with pytest.raises(PGAError):
        e12 ** -1


def test_versor_inverse():
    a = 3.0 * PGA3D.blade("e1") + 4.0 * PGA3D.blade("e2")
    assert (a * a.inverse()).isclose(1.0)
    with pytest.raises(PGAError):
        PGA3D.blade("e0").inverse()


def test_json_round_trip_is_exact():
    mv = Multivector(PGA3D, np.linspace(-1.0, 1.0, 16) / 3.0)
    restored = Multivector.from_json(PGA3D, mv.to_json())
    assert np.array_equal(restored.coeffs, mv.coeffs)


def test_exp_series_of_rotation_bivector():
    theta = 0.7
    result = exp_series(theta * PGA2D.blade("e12"))
    assert result.isclose(math.cos(theta) + math.sin(theta) * PGA2D.blade("e12"))
    assert exp_series(PGA3D.scalar(1.0)).isclose(math.e)


def test_cayley_rows_follow_blade_order():
    table = PGA2D.cayley_table()
    assert len(table) == 8
    assert table[0] == [(1.0, mask) for mask in PGA2D.blade_order]


def test_element_rejects_stray_grades():
    with pytest.raises(GradeError):
        Point2(PGA2D.scalar(1.0))
    noisy = Point2(PGA2D.blade("e12") + 1e-14)
    assert noisy.mv.scalar == 0.0


@given(multivectors(), multivectors(), multivectors())
def test_associativity(a, b, c):
    assert mv_close((a * b) * c, a * (b * c), 1e-12)
    assert mv_close((a ^ b) ^ c, a ^ (b ^ c), 1e-12)


@given(multivectors(), multivectors(), multivectors())
def test_distributivity(a, b, c):
    assert mv_close(a * (b + c), a * b + a * c, 1e-12)
    assert mv_close((a + b) ^ c, (a ^ c) + (b ^ c), 1e-12)


@given(multivectors(), multivectors())
def test_reverse_is_anti_automorphism(a, b):
    assert mv_close((a * b).reverse(), b.reverse() * a.reverse(), 1e-12)
    assert mv_close(~~a, a, 0.0)


@given(multivectors(PGA2D))
def test_duality_round_trip_exact(a):
    assert np.array_equal(poincare_undual(poincare_dual(a)).coeffs, a.coeffs)


def test_blade_wedge_dual_is_pseudoscalar():
    for mask in range(PGA3D.blade_count):
        coeffs = np.zeros(16)
        coeffs[mask] = 1.0
        blade = Multivector(PGA3D, coeffs)
        assert (blade ^ blade.dual()).isclose(PGA3D.pseudoscalar())


@given(multivectors(), multivectors())
def test_vector_products_split_geometric_product(a, b):
    a, b = a.grade_part(1), b.grade_part(1)
    assert mv_close(outer_product(a, b), (a * b - b * a) * 0.5, 1e-12)
    assert mv_close(inner_product(a, b), (a * b + b * a) * 0.5, 1e-12)


@given(multivectors(), multivectors())
def test_commutator_equals_cross_on_bivectors(a, b):
    a, b = a.grade_part(2), b.grade_part(2)
    assert mv_close(commutator(a, b), cross(a, b), 1e-12)


def test_regressive_product_of_planes_grades():
    # join of two 3D points is a line, of a point and a line a plane
    p = PGA3D.blade("e123")
    q = PGA3D.blade("e123") + PGA3D.blade("e032")
    line = regressive_product(p, q)
    assert line.grade(1e-15) == 2
    assert regressive_product(line, PGA3D.blade("e123") + PGA3D.blade("e013")).grade(1e-15) == 1


def test_sandwich_by_unit_vector_is_reflection():
    # x = 0 mirror sends e1 to -e1 and keeps e2
    m = PGA3D.blade("e1")
    assert sandwich(m, PGA3D.blade("e1")).isclose(PGA3D.blade("e1"))
    assert sandwich(m, PGA3D.blade("e2")).isclose(-PGA3D.blade("e2"))


def test_algebra_laws_deterministic_trials():
    rng = np.random.default_rng(np.random.SeedSequence(20240101))
    worst = 0.0
    for _ in range(1000):
        a, b, c = (Multivector(PGA3D, rng.uniform(-1.0, 1.0, 16)) for _ in range(3))
        worst = max(
            worst,
            ((a * b) * c).max_abs_diff(a * (b * c)),
            (a * (b + c)).max_abs_diff(a * b + a * c),
            (a * b).reverse().max_abs_diff(b.reverse() * a.reverse()),
            a.dual().undual().max_abs_diff(a),
        )
    assert worst < 1e-12


def _ideal_part(x: Multivector) -> Multivector:
    coeffs = np.array(x.coeffs)
    coeffs[np.arange(x.algebra.blade_count) & 1 == 0] = 0.0
    return Multivector(x.algebra, coeffs)


@given(unit_vectors(), small, multivectors())
def test_reflection_preserves_norms(n, d, x):
    mirror = Multivector(PGA3D, [0.0, d, n[0], 0.0, n[1], 0.0, 0.0, 0.0, n[2]] + [0.0] * 7)
    assert (mirror * mirror).isclose(1.0, 1e-12)
    assert sandwich(mirror, x).norm() == pytest.approx(x.norm(), rel=1e-9, abs=1e-9)
    ideal = _ideal_part(x)
    assert ideal.norm() == 0.0
    assert sandwich(mirror, ideal).ideal_norm() == pytest.approx(ideal.ideal_norm(), rel=1e-9, abs=1e-9)
