"""Shared hypothesis strategies for the geometry tests."""
import math

import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from src import pga2d, pga3d
from src.algebra import PGA2D, PGA3D, Multivector

settings.register_profile(
    "default",
    deadline=None,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

coordinate = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)
small = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)
angle = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False, allow_infinity=False)


def multivectors(algebra=PGA3D, elements=small):
    return st.lists(elements, min_size=algebra.blade_count, max_size=algebra.blade_count).map(
        lambda coeffs: Multivector(algebra, coeffs)
    )


@st.composite
def unit_vectors(draw, n=3):
    """Uniform-ish unit vectors; draws too close to zero are rejected."""
    v = np.array(draw(st.lists(small, min_size=n, max_size=n)))
    norm = np.linalg.norm(v)
    if norm < 0.1:
        v = np.eye(n)[draw(st.integers(min_value=0, max_value=n - 1))]
        norm = 1.0
    return v / norm


@st.composite
def points2(draw):
    return draw(st.tuples(coordinate, coordinate))


@st.composite
def lines2(draw):
    theta = draw(angle)
    c = draw(coordinate)
    return pga2d.line(math.cos(theta), math.sin(theta), c)


@st.composite
def points3(draw):
    return np.array(draw(st.tuples(coordinate, coordinate, coordinate)))


@st.composite
def planes3(draw):
    n = draw(unit_vectors())
    return pga3d.plane(n[0], n[1], n[2], draw(coordinate))


@st.composite
def lines3(draw):
    """(line, point on it, unit direction)"""
    p = draw(points3())
    u = draw(unit_vectors())
    return pga3d.line_from_point_direction(p, u), p, u


@st.composite
def skew_line_pairs(draw):
    """Two lines whose directions are at least ~0.2 rad from parallel."""
    first = draw(lines3())
    second = draw(lines3())
    if np.linalg.norm(np.cross(first[2], second[2])) < 0.2:
        u = first[2]
        helper = np.eye(3)[int(np.argmin(np.abs(u)))]
        v = np.cross(u, helper)
        v /= np.linalg.norm(v)
        second = (pga3d.line_from_point_direction(second[1], v), second[1], v)
    return first, second


@st.composite
def bivectors3(draw, scale=1.0):
    coords = np.array(draw(st.lists(small, min_size=6, max_size=6))) * scale
    return pga3d.bivector_from_coords(coords)


@st.composite
def motors3(draw):
    line, _, _ = draw(lines3())
    return pga3d.motor_from_screw(line, draw(angle), draw(small))


def assert_close(actual, expected, tol=1e-10):
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    assert np.max(np.abs(actual - expected)) <= tol, f"{actual} != {expected}"


def mv_close(a: Multivector, b, tol=1e-10) -> bool:
    return a.max_abs_diff(b) <= tol
