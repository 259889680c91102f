"""几何与格点计数测试"""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
import mpmath
from mpmath import mp

from config import config
from errors import DomainError
from geometry import (LatticeSpec, Rectangle, clip_half_plane, clip_to_box, polygon_area,
                      rotate_points, vertical_chords)

unit_fractions = st.fractions(min_value=0, max_value=1, max_denominator=97).filter(lambda x: x < 1)


def _brute_count(spec: LatticeSpec, R: Rectangle, radius: int) -> int:
    with mp.workprec(config.precision):
        return sum(1 for i in range(-radius, radius + 1) for j in range(-radius, radius + 1)
                   if R.contains(*spec.from_lattice(i, j)))


def test_unit_lattice_axis_rectangle(unit_lattice):
    R = Rectangle.axis_aligned(0, Fraction(5, 2), 0, Fraction(3, 2))
    count = unit_lattice.count_in_rect(R)
    assert count == 6
    assert count - R.area == Fraction(9, 4)


@given(unit_fractions, unit_fractions, st.fractions(min_value=-3, max_value=3, max_denominator=31),
       st.fractions(min_value=-3, max_value=3, max_denominator=31))
def test_fundamental_domain_holds_one_point(w1, w2, x0, y0):
    spec = LatticeSpec(Fraction(0), 1, (w1, w2))
    assert spec.count_in_rect(Rectangle.axis_aligned(x0, x0 + 1, y0, y0 + 1)) == 1


def test_rotated_square_matches_enumeration(unit_lattice):
    with mp.workprec(config.precision):
        side = mpmath.sqrt(2)
        R = Rectangle((Fraction(3, 10), Fraction(1, 7)), side, side, mp.pi / 4)
    assert unit_lattice.count_in_rect(R) == _brute_count(unit_lattice, R, 4)


@given(st.fractions(min_value=-2, max_value=2, max_denominator=50),
       st.floats(min_value=0.2, max_value=3.0), st.floats(min_value=0.2, max_value=3.0),
       st.floats(min_value=0.0, max_value=3.1), st.floats(min_value=-1.0, max_value=1.0),
       st.floats(min_value=-1.0, max_value=1.0))
@settings(max_examples=80, deadline=None)
def test_rows_match_enumeration(slope, w, h, phi, cx, cy):
    spec = LatticeSpec(slope, 3, (Fraction(1, 3), Fraction(1, 5)))
    R = Rectangle((cx, cy), w, h, phi)
    assert spec.count_in_rect(R) == _brute_count(spec, R, 20)


def test_lattice_coordinates_invert():
    spec = LatticeSpec(Fraction(2, 7), 5, (Fraction(1, 4), Fraction(1, 9)))
    with mp.workprec(config.precision):
        x, y = spec.from_lattice(3, -2)
        i, j = spec.to_lattice(x, y)
        assert abs(i - 3) < 1e-30 and abs(j + 2) < 1e-30


def test_exact_lattice_stays_rational():
    spec = LatticeSpec(Fraction(0), Fraction(2), (Fraction(1, 2), Fraction(0)))
    assert spec.from_lattice(1, 1) == (Fraction(3, 4), Fraction(1, 2))


def test_rectangle_half_open():
    R = Rectangle.axis_aligned(0, 1, 0, 1)
    assert R.contains(0, 0)
    assert not R.contains(1, 0)
    assert not R.contains(0, 1)
    mask = R.contains_array(np.array([0.0, 0.999, 1.0]), np.array([0.0, 0.5, 0.5]))
    assert mask.tolist() == [True, True, False]


def test_rectangle_validation_and_geometry():
    with pytest.raises(DomainError):
        Rectangle((0, 0), 0, 1)
    R = Rectangle.axis_aligned(Fraction(1, 4), Fraction(3, 4), Fraction(1, 4), Fraction(1, 2))
    assert R.area == Fraction(1, 8)
    assert R.is_inside_unit_square()
    assert not R.translated(Fraction(1, 2), 0).is_inside_unit_square()
    assert R.vertices()[0] == (Fraction(1, 4), Fraction(1, 4))


def test_polygon_clip_exact():
    square = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
              (Fraction(1), Fraction(1)), (Fraction(0), Fraction(1))]
    triangle = clip_half_plane(square, 1, 1, 1)
    assert polygon_area(triangle) == Fraction(1, 2)
    box = clip_to_box(square, Fraction(1, 4), Fraction(1, 2), Fraction(-1), Fraction(1, 3))
    assert polygon_area(box) == Fraction(1, 12)


def test_vertical_chords():
    square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    lo, hi = vertical_chords(square, np.array([0.5, 2.0]))
    assert (lo[0], hi[0]) == (0.0, 1.0)
    assert lo[1] == np.inf and hi[1] == -np.inf


def test_rotate_points_quarter_turn():
    xs, ys = rotate_points(np.array([1.0]), np.array([0.0]), math.pi / 2)
    assert xs[0] == pytest.approx(0.0, abs=1e-15)
    assert ys[0] == pytest.approx(1.0)
